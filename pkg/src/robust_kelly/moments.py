"""Polynomial moment integrals over an uncertainty set.

``I(a, b) = integral over P of p**a * (1 - p)**b dp``, evaluated with
per-interval Gauss-Legendre quadrature. The integrand is a polynomial of
degree ``a + b`` so the rule is exact up to rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Tuple

import numpy as np

from .uncertainty import UncertaintySet

_NEWTON_TOL = 1e-15
_NEWTON_MAX_ITER = 100


def _legendre(order: int, x: float) -> Tuple[float, float]:
    """Value and derivative of the degree-``order`` Legendre polynomial at x."""
    p0, p1 = 1.0, x
    for j in range(2, order + 1):
        p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
    return p1, order * (x * p1 - p0) / (x * x - 1.0)


@lru_cache(maxsize=None)
def gauss_legendre(order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [-1, 1] for an ``order``-point rule.

    Legendre roots come from Newton iteration started at the usual
    cosine guesses. Returned arrays are sorted ascending and read-only.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    nodes = np.zeros(order)
    weights = np.zeros(order)
    for i in range(order // 2):
        x = math.cos(math.pi * (i + 0.75) / (order + 0.5))
        for _ in range(_NEWTON_MAX_ITER):
            value, deriv = _legendre(order, x)
            step = value / deriv
            x -= step
            if abs(step) <= _NEWTON_TOL:
                break
        _, deriv = _legendre(order, x)
        w = 2.0 / ((1.0 - x * x) * deriv * deriv)
        nodes[i], nodes[order - 1 - i] = -x, x
        weights[i] = weights[order - 1 - i] = w
    if order % 2 == 1:
        # middle root is exactly 0
        _, deriv = _legendre(order, 0.0)
        weights[order // 2] = 2.0 / (deriv * deriv)
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return nodes, weights


def _nodes_for(pset: UncertaintySet, degree: int) -> Tuple[np.ndarray, np.ndarray]:
    """Quadrature points and weights covering every interval of ``pset``."""
    order = max(1, math.ceil((degree + 2) / 2))
    x, w = gauss_legendre(order)
    pts, wts = [], []
    for lo, hi in pset.intervals:
        half = 0.5 * (hi - lo)
        pts.append(lo + half * (x + 1.0))
        wts.append(half * w)
    return np.concatenate(pts), np.concatenate(wts)


def moment(pset: UncertaintySet, a: int, b: int) -> float:
    """Return the integral of ``p**a * (1-p)**b`` over ``pset``."""
    if a < 0 or b < 0:
        raise ValueError("moment exponents must be nonnegative")
    p, w = _nodes_for(pset, a + b)
    return float(np.dot(w, p**a * (1.0 - p) ** b))


@dataclass(frozen=True)
class MomentTable:
    """All moments ``I(a, b)`` with ``a + b <= max_degree``."""

    pset: UncertaintySet
    max_degree: int
    values: Dict[Tuple[int, int], float] = field(repr=False)

    def __getitem__(self, key: Tuple[int, int]) -> float:
        return self.values[key]

    def __contains__(self, key) -> bool:
        return key in self.values

    def __len__(self) -> int:
        return len(self.values)


def moment_table(pset: UncertaintySet, n: int) -> MomentTable:
    """Precompute ``I(a, b)`` for every ``a + b <= n`` in one quadrature pass."""
    if n < 1:
        raise ValueError("n must be >= 1")
    p, w = _nodes_for(pset, n)
    powers_p = p[None, :] ** np.arange(n + 1)[:, None]
    powers_q = (1.0 - p)[None, :] ** np.arange(n + 1)[:, None]
    values = {}
    for a in range(n + 1):
        for b in range(n + 1 - a):
            values[(a, b)] = float(np.dot(w, powers_p[a] * powers_q[b]))
    return MomentTable(pset=pset, max_degree=n, values=values)
