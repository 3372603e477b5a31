"""Expected logarithmic growth (ELG) of controllers.

ELG values are plain floats; ``-inf`` is a legitimate value (a full-wealth
bet lost with positive probability), never an error. Terms carrying zero
probability contribute zero even when their log factor is ``-inf``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy import integrate
from scipy.special import xlogy

from .controller import Controller, format_number, robust_optimal, static_linear_optimal
from .moments import moment_table
from .uncertainty import UncertaintySet

NEG_INF = float("-inf")

_QUAD_TOL = 1e-12


def _check_p(p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability must lie in [0, 1], got {p}")
    return p


def _stage_term(w_up: float, w_down: float, gain: float) -> float:
    # w * log(1 +- K) with 0 * log(0) = 0
    with np.errstate(divide="ignore"):
        return float(xlogy(w_up, 1.0 + gain) + xlogy(w_down, 1.0 - gain))


def elg_at(controller: Controller, n: int, p: float) -> float:
    """ELG of ``controller`` over ``n`` flips when the heads probability is ``p``.

    Controllers whose gains depend only on (stage, head count) are evaluated
    by an O(n^2) sum over head counts, anything else by enumerating all
    ``2**n`` sample paths.
    """
    p = _check_p(p)
    if not controller.kq_structured:
        return elg_at_enumerated(controller, n, p)
    total = 0.0
    for k in range(n):
        for q in range(k + 1):
            reach = math.comb(k, q) * p**q * (1.0 - p) ** (k - q)
            total += _stage_term(reach * p, reach * (1.0 - p), controller.kq_gain(k, q))
    return total / n


def _all_paths(n: int) -> np.ndarray:
    """``(2**n, n)`` boolean array of every sample path, True = heads."""
    offsets = np.arange(2**n)
    return ((offsets[:, None] >> np.arange(n - 1, -1, -1)[None, :]) & 1).astype(bool)


def path_log_growths(controller: Controller, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Head counts and summed log factors for every path (not divided by n)."""
    heads = _all_paths(n)
    signs = np.where(heads, 1.0, -1.0)
    logs = np.zeros(2**n)
    with np.errstate(divide="ignore"):
        for k in range(n):
            gains = controller.stage_gains(k, heads[:, :k])
            logs += np.log1p(gains * signs[:, k])
    return heads.sum(axis=1), logs


def elg_at_enumerated(controller: Controller, n: int, p: float) -> float:
    """ELG by brute-force enumeration of all ``2**n`` paths."""
    p = _check_p(p)
    n_heads, logs = path_log_growths(controller, n)
    probs = p**n_heads * (1.0 - p) ** (n - n_heads)
    positive = probs > 0
    return float(np.sum(probs[positive] * logs[positive]) / n)


def elg_star(p: float) -> float:
    """Perfect-information optimum ``p log 2p + (1-p) log 2(1-p)``."""
    p = _check_p(p)
    return float(xlogy(p, 2.0 * p) + xlogy(1.0 - p, 2.0 * (1.0 - p)))


def integrated_elg(controller: Controller, n: int, pset: UncertaintySet) -> float:
    """Integral of ``elg_at(controller, n, p)`` over ``p`` in ``pset``."""
    if controller.kq_structured:
        moments = moment_table(pset, n)
        total = 0.0
        for k in range(n):
            for q in range(k + 1):
                c = math.comb(k, q)
                total += _stage_term(
                    c * moments[q + 1, k - q],
                    c * moments[q, k - q + 1],
                    controller.kq_gain(k, q),
                )
        return total / n

    # every node is reached with positive integrated probability
    gains = getattr(controller, "gains", None)
    if gains is not None and any(abs(g) == 1.0 for g in gains):
        return NEG_INF
    total = 0.0
    for lo, hi in pset.intervals:
        value, _ = integrate.quad(
            lambda p: elg_at(controller, n, p), lo, hi, epsabs=_QUAD_TOL, epsrel=_QUAD_TOL, limit=200
        )
        total += value
    return total


def integrated_elg_star(pset: UncertaintySet) -> float:
    total = 0.0
    for lo, hi in pset.intervals:
        value, _ = integrate.quad(elg_star, lo, hi, epsabs=_QUAD_TOL, epsrel=_QUAD_TOL, limit=200)
        total += value
    return total


def err_integral(controller: Controller, n: int, pset: UncertaintySet) -> float:
    """Integrated regret against the perfect-information optimum (``+inf`` on ruin)."""
    achieved = integrated_elg(controller, n, pset)
    if achieved == NEG_INF:
        return float("inf")
    return integrated_elg_star(pset) - achieved


def uniform_grid(grid_size: int) -> np.ndarray:
    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")
    return np.linspace(0.0, 1.0, grid_size)


@dataclass(frozen=True)
class ElgCurve:
    grid: Tuple[float, ...]
    values: Tuple[float, ...]
    controller: str = ""
    pset: Optional[str] = None

    def __post_init__(self):
        if len(self.grid) != len(self.values):
            raise ValueError("grid and values must have equal length")
        if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise ValueError("grid must be strictly increasing")

    def to_csv(self) -> str:
        buf = io.StringIO()
        if self.pset is not None:
            buf.write(f"# pset={self.pset}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["p", "elg"])
        for p, v in zip(self.grid, self.values):
            writer.writerow([format_number(p), format_number(v)])
        return buf.getvalue()


def elg_curve(controller: Controller, n: int, grid_size: int, pset: Optional[UncertaintySet] = None) -> ElgCurve:
    grid = uniform_grid(grid_size)
    return ElgCurve(
        grid=tuple(float(p) for p in grid),
        values=tuple(elg_at(controller, n, p) for p in grid),
        controller=type(controller).__name__,
        pset=pset.to_string() if pset is not None else None,
    )


def comparison_rows(pset: UncertaintySet, n: int, grid_size: int):
    """Rows ``(p, elg_star, elg_robust, elg_static)`` over a uniform grid on [0, 1]."""
    robust = robust_optimal(pset, n)
    static = static_linear_optimal(pset)
    return [
        (float(p), elg_star(p), elg_at(robust, n, p), elg_at(static, n, p))
        for p in uniform_grid(grid_size)
    ]


def comparison_csv(pset: UncertaintySet, n: int, grid_size: int) -> str:
    buf = io.StringIO()
    buf.write(f"# pset={pset.to_string()}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["p", "elg_star", "elg_robust", "elg_static"])
    for row in comparison_rows(pset, n, grid_size):
        writer.writerow([format_number(x) for x in row])
    return buf.getvalue()
