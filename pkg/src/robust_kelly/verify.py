"""Brute-force oracles for the closed-form robust gains.

Everything here works on explicit trees and integrates path probabilities
with exact polynomial antiderivatives (numpy.polynomial), so it shares no
code path with the moment-table construction it checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import Polynomial

from .controller import ExplicitTree, all_histories, as_explicit_tree, robust_optimal
from .uncertainty import UncertaintySet

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
EDGE = 1e-12
# relative to the node mass; far above rounding in g, far below any real dip
NODE_NOISE = 1e-12


@dataclass
class GoldenResult:
    x: float
    fx: float
    iterations: int
    unimodal: bool


def golden_section_max(
    f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-10, noise: float = 0.0
) -> GoldenResult:
    """Maximize a unimodal ``f`` on ``[lo, hi]`` to bracket width ``tol``.

    Also reports whether every probed quadruple ``f(a), f(c), f(d), f(b)``
    was consistent with a single interior maximum. Dips smaller than
    ``noise`` (absolute) count as ties.
    """
    a, b = lo, hi
    fa, fb = f(a), f(b)
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    unimodal = True
    iterations = 0
    while b - a > tol:
        if fc < min(fa, fd) - noise or fd < min(fc, fb) - noise:
            unimodal = False
        if fc >= fd:
            b, fb = d, fd
            d, fd = c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, fa = c, fc
            c, fc = d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
        iterations += 1
    x = c if fc >= fd else d
    return GoldenResult(x=x, fx=max(fc, fd), iterations=iterations, unimodal=unimodal)


@lru_cache(maxsize=4096)
def _path_mass(pset: UncertaintySet, heads: int, tails: int) -> float:
    """Integral of ``p**heads * (1-p)**tails`` over ``pset`` via an exact antiderivative."""
    poly = Polynomial([0.0, 1.0]) ** heads * Polynomial([1.0, -1.0]) ** tails
    anti = poly.integ()
    return float(sum(anti(hi) - anti(lo) for lo, hi in pset.intervals))


def _paths(n: int) -> List[Tuple[int, ...]]:
    return list(all_histories(n))


def _path_logs(tree: ExplicitTree, path: Sequence[int]) -> float:
    total = 0.0
    for k, x in enumerate(path):
        factor = 1.0 + tree.gains[ExplicitTree.node_index(path[:k])] * x
        total += math.log(factor) if factor > 0 else -math.inf
    return total


def _objective_terms(tree: ExplicitTree, pset: UncertaintySet, n: int) -> List[float]:
    terms = []
    for path in _paths(n):
        h = sum(1 for x in path if x == 1)
        terms.append(_path_mass(pset, h, n - h) * _path_logs(tree, path) / n)
    return terms


def oracle_objective(tree: ExplicitTree, pset: UncertaintySet, n: int) -> float:
    """Integrated ELG by enumerating all ``2**n`` paths."""
    if tree.n != n:
        raise ValueError(f"tree horizon {tree.n} != n={n}")
    terms = _objective_terms(tree, pset, n)
    if any(t == -math.inf for t in terms):
        return -math.inf
    return math.fsum(terms)


def _objective_scale(tree: ExplicitTree, pset: UncertaintySet, n: int) -> float:
    """Sum of absolute path contributions; the natural magnitude for relative gaps."""
    return math.fsum(abs(t) for t in _objective_terms(tree, pset, n))


def node_coefficients(pset: UncertaintySet, n: int, history: Sequence[int]) -> Tuple[float, float]:
    """Integrated probability of reaching ``history`` then seeing heads / tails.

    Summed over every full path through the node, straight from the path
    probabilities.
    """
    k = len(history)
    up = down = 0.0
    for path in _paths(n):
        if tuple(path[:k]) != tuple(history):
            continue
        h = sum(1 for x in path if x == 1)
        mass = _path_mass(pset, h, n - h)
        if path[k] == 1:
            up += mass
        else:
            down += mass
    return up, down


@dataclass
class OracleResult:
    best_gains: ExplicitTree
    best_objective: float
    closed_form_objective: float
    max_gain_gap: float
    objective_gap: float
    iterations: int
    unimodal: bool

    @property
    def passed(self) -> bool:
        return self.unimodal and self.max_gain_gap < 1e-7 and self.objective_gap < 1e-10


def oracle_optimize(pset: UncertaintySet, n: int, tol: float = 1e-10) -> OracleResult:
    """Maximize every node's one-variable objective by golden-section search.

    ``objective_gap`` is relative to the summed absolute path contributions.
    """
    if not 1 <= n <= 4:
        raise ValueError("full-tree oracle supports 1 <= n <= 4")
    if not tol > 0:
        raise ValueError("tol must be positive")
    gains = []
    iterations = 0
    unimodal = True
    for k in range(n):
        for history in all_histories(k):
            up, down = node_coefficients(pset, n, history)

            def g(x, up=up, down=down):
                return up * math.log1p(x) + down * math.log1p(-x)

            res = golden_section_max(
                g, -1.0 + EDGE, 1.0 - EDGE, tol=tol, noise=NODE_NOISE * (up + down)
            )
            gains.append(res.x)
            iterations += res.iterations
            unimodal &= res.unimodal
    tree = ExplicitTree(n=n, gains=tuple(gains))
    closed = as_explicit_tree(robust_optimal(pset, n), n)
    best = oracle_objective(tree, pset, n)
    closed_obj = oracle_objective(closed, pset, n)
    scale = max(_objective_scale(closed, pset, n), np.finfo(float).tiny)
    return OracleResult(
        best_gains=tree,
        best_objective=best,
        closed_form_objective=closed_obj,
        max_gain_gap=max(abs(a - b) for a, b in zip(tree.gains, closed.gains)),
        objective_gap=abs(best - closed_obj) / scale,
        iterations=iterations,
        unimodal=unimodal,
    )


def perturbation_decreases(pset: UncertaintySet, n: int, delta: float = 1e-3) -> Dict[Tuple[int, int], Tuple[float, float]]:
    """Objective change for ``+delta`` and ``-delta`` at every closed-form node.

    Keys are ``(node_index, sign)``; the value is the exact (fsum) change of
    the oracle objective. Moves leaving [-1, 1] report ``-inf``.
    """
    closed = as_explicit_tree(robust_optimal(pset, n), n)
    base = _objective_terms(closed, pset, n)
    out = {}
    for idx in range(len(closed.gains)):
        for sign in (1, -1):
            moved = closed.gains[idx] + sign * delta
            if not -1.0 <= moved <= 1.0:
                out[(idx, sign)] = -math.inf
                continue
            gains = list(closed.gains)
            gains[idx] = moved
            terms = _objective_terms(ExplicitTree(n=n, gains=tuple(gains)), pset, n)
            out[(idx, sign)] = math.fsum(terms + [-t for t in base])
    return out


def coordinate_ascent(pset: UncertaintySet, n: int, seed: int = 0, starts: int = 3, sweeps: int = 3, tol: float = 1e-10) -> float:
    """Generic check that ignores separability: cyclic one-coordinate ascent on the
    full enumerated objective from random starts. Returns the largest gap to the
    closed-form gains over all starts.
    """
    if not 1 <= n <= 3:
        raise ValueError("coordinate ascent check supports 1 <= n <= 3")
    rng = np.random.default_rng(seed)
    closed = as_explicit_tree(robust_optimal(pset, n), n)
    worst = 0.0
    for _ in range(starts):
        gains = list(rng.uniform(-0.9, 0.9, size=2**n - 1))
        for _ in range(sweeps):
            for idx in range(len(gains)):

                def obj(x, idx=idx):
                    trial = list(gains)
                    trial[idx] = x
                    return oracle_objective(ExplicitTree(n=n, gains=tuple(trial)), pset, n)

                gains[idx] = golden_section_max(obj, -1.0 + EDGE, 1.0 - EDGE, tol=tol).x
        worst = max(worst, max(abs(a - b) for a, b in zip(gains, closed.gains)))
    return worst


@dataclass
class AuditReport:
    n: int
    table_size: int
    expected_size: int
    tree_nodes: int
    distinct_per_stage: List[int]
    color_classes_ok: bool
    violations: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations


def structural_audit(pset: UncertaintySet, n: int) -> AuditReport:
    """Check the (stage, head count) structure of the optimum on its full tree."""
    if not 1 <= n <= 12:
        raise ValueError("structural audit supports 1 <= n <= 12")
    controller = robust_optimal(pset, n)
    tree = as_explicit_tree(controller, n)
    violations = []
    distinct = []
    color_ok = True
    for k in range(n):
        stage = tree.stage(k)
        distinct.append(len(set(stage)))
        if distinct[-1] > k + 1:
            violations.append(f"stage {k}: {distinct[-1]} distinct gains > {k + 1}")
        by_heads: Dict[int, set] = {}
        for history, g in zip(all_histories(k), stage):
            by_heads.setdefault(sum(1 for x in history if x == 1), set()).add(g)
        for q, values in by_heads.items():
            if len(values) != 1 or values != {controller.table.gain(k, q)}:
                color_ok = False
                violations.append(f"stage {k}, {q} heads: gains differ across histories")
    size = controller.table.n_entries
    expected = n * (n + 1) // 2
    if size != expected:
        violations.append(f"table size {size} != {expected}")
    return AuditReport(
        n=n,
        table_size=size,
        expected_size=expected,
        tree_nodes=len(tree.gains),
        distinct_per_stage=distinct,
        color_classes_ok=color_ok,
        violations=violations,
    )
