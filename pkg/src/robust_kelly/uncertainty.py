"""Uncertainty sets for the heads probability.

A set is a finite union of closed, pairwise disjoint subintervals of [0, 1]
with positive total length.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Tuple

Interval = Tuple[float, float]


class InvalidUncertaintySet(ValueError):
    """Raised when intervals cannot describe a positive-measure subset of [0, 1]."""


@dataclass(frozen=True)
class UncertaintySet:
    """Sorted, merged, disjoint intervals. Build with :func:`make_uncertainty_set`."""

    intervals: Tuple[Interval, ...]

    def __post_init__(self):
        if not self.intervals:
            raise InvalidUncertaintySet("uncertainty set needs at least one interval")
        prev_hi = None
        for lo, hi in self.intervals:
            if not (0.0 <= lo < hi <= 1.0):
                raise InvalidUncertaintySet(f"bad interval ({lo!r}, {hi!r})")
            if prev_hi is not None and not prev_hi < lo:
                raise InvalidUncertaintySet("intervals must be sorted and disjoint")
            prev_hi = hi

    @property
    def p_min(self) -> float:
        return self.intervals[0][0]

    @property
    def p_max(self) -> float:
        return self.intervals[-1][1]

    @property
    def measure(self) -> float:
        return measure(self)

    @property
    def centroid(self) -> float:
        return centroid(self)

    def is_symmetric(self, tol: float = 1e-15) -> bool:
        """True if the set is invariant under p -> 1 - p."""
        mirrored = [(1.0 - hi, 1.0 - lo) for lo, hi in reversed(self.intervals)]
        return all(
            abs(a[0] - b[0]) <= tol and abs(a[1] - b[1]) <= tol
            for a, b in zip(self.intervals, mirrored)
        )

    def to_string(self) -> str:
        return ",".join(f"{lo:.12g}:{hi:.12g}" for lo, hi in self.intervals)

    def __str__(self) -> str:
        return self.to_string()


def make_uncertainty_set(intervals: Iterable[Sequence[float]]) -> UncertaintySet:
    """Validate and normalize a list of ``(lo, hi)`` pairs.

    Overlapping or touching intervals are merged. Zero-length intervals,
    reversed pairs and endpoints outside [0, 1] are rejected.
    """
    pairs = []
    for item in intervals:
        try:
            lo, hi = (float(v) for v in item)
        except (TypeError, ValueError) as exc:
            raise InvalidUncertaintySet(f"not a (lo, hi) pair: {item!r}") from exc
        if not (0.0 <= lo <= 1.0 and 0.0 <= hi <= 1.0):
            raise InvalidUncertaintySet(f"endpoints must lie in [0, 1]: ({lo}, {hi})")
        if not lo < hi:
            raise InvalidUncertaintySet(f"need lo < hi, got ({lo}, {hi})")
        pairs.append((lo, hi))
    if not pairs:
        raise InvalidUncertaintySet("uncertainty set needs at least one interval")

    pairs.sort()
    merged = [pairs[0]]
    for lo, hi in pairs[1:]:
        last_lo, last_hi = merged[-1]
        if lo <= last_hi:
            merged[-1] = (last_lo, max(last_hi, hi))
        else:
            merged.append((lo, hi))
    return UncertaintySet(tuple(merged))


def parse_uncertainty_set(text: str) -> UncertaintySet:
    """Parse ``"lo:hi[,lo:hi...]"``, e.g. ``"0.25:0.95"`` or ``"0:0.2, 0.8:1"``."""
    cleaned = "".join(text.split())
    if not cleaned:
        raise InvalidUncertaintySet("empty uncertainty set string")
    pairs = []
    for chunk in cleaned.split(","):
        parts = chunk.split(":")
        if len(parts) != 2:
            raise InvalidUncertaintySet(f"expected lo:hi, got {chunk!r}")
        try:
            pairs.append((float(parts[0]), float(parts[1])))
        except ValueError as exc:
            raise InvalidUncertaintySet(f"bad number in {chunk!r}") from exc
    return make_uncertainty_set(pairs)


def measure(pset: UncertaintySet) -> float:
    return sum(hi - lo for lo, hi in pset.intervals)


def centroid(pset: UncertaintySet) -> float:
    """Mean of p under the uniform distribution on the set."""
    total = measure(pset)
    # length-weighted midpoints == (1/mu) * integral of p dp
    value = sum((hi - lo) * (lo + hi) / 2.0 for lo, hi in pset.intervals) / total
    return min(max(value, pset.p_min), pset.p_max)
