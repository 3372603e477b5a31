"""Admissible betting controllers and the three optimal policy families.

A controller maps the observed flip history (a tuple over {-1, +1}, heads
being +1) to the fraction of current wealth wagered on heads. Negative
fractions are bets on tails. Every gain lies in [-1, 1].
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .moments import moment_table
from .uncertainty import UncertaintySet, centroid, parse_uncertainty_set

History = Tuple[int, ...]

_EPS = float(np.finfo(float).eps)
_TIE_ULPS = 8


def _check_gain(value: float) -> float:
    value = float(value)
    if not -1.0 <= value <= 1.0:
        raise ValueError(f"gain {value!r} violates the budget constraint |K| <= 1")
    return value


def parse_history(history) -> History:
    """Normalize a history given as a string over {H, T} or a sequence over {-1, +1}."""
    if isinstance(history, str):
        out = []
        for ch in history.strip().upper():
            if ch == "H":
                out.append(1)
            elif ch == "T":
                out.append(-1)
            else:
                raise ValueError(f"history characters must be H or T, got {ch!r}")
        return tuple(out)
    out = tuple(int(x) for x in history)
    if any(x not in (-1, 1) for x in out):
        raise ValueError("history entries must be -1 (tails) or +1 (heads)")
    return out


@dataclass(frozen=True)
class GainTable:
    """Triangular table ``gains[k][q]`` for stage ``k`` after ``q`` observed heads."""

    n: int
    gains: Tuple[Tuple[float, ...], ...]
    pset: Optional[UncertaintySet] = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("horizon n must be >= 1")
        if len(self.gains) != self.n:
            raise ValueError(f"expected {self.n} rows, got {len(self.gains)}")
        for k, row in enumerate(self.gains):
            if len(row) != k + 1:
                raise ValueError(f"row {k} must hold {k + 1} gains, got {len(row)}")
            for g in row:
                _check_gain(g)

    def __getitem__(self, k: int) -> Tuple[float, ...]:
        return self.gains[k]

    def gain(self, k: int, q: int) -> float:
        return self.gains[k][q]

    @property
    def n_entries(self) -> int:
        return sum(len(row) for row in self.gains)

    def as_array(self) -> np.ndarray:
        """Square ``(n, n)`` array with NaN above the diagonal."""
        out = np.full((self.n, self.n), np.nan)
        for k, row in enumerate(self.gains):
            out[k, : k + 1] = row
        return out

    def to_json(self) -> str:
        payload = {
            "n": self.n,
            "pset": self.pset.to_string() if self.pset is not None else None,
            "gains": [list(row) for row in self.gains],
        }
        return json.dumps(payload, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "GainTable":
        payload = json.loads(text)
        pset = payload.get("pset")
        return cls(
            n=int(payload["n"]),
            gains=tuple(tuple(float(g) for g in row) for row in payload["gains"]),
            pset=parse_uncertainty_set(pset) if pset else None,
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["k", "q", "gain"])
        for k, row in enumerate(self.gains):
            for q, g in enumerate(row):
                writer.writerow([k, q, format_number(g)])
        return buf.getvalue()


def format_number(x: float) -> str:
    """12 significant digits; ``-inf`` spelled literally."""
    if x == float("-inf"):
        return "-inf"
    out = f"{x:.12g}"
    return "0" if out == "-0" else out


class Controller:
    """Base class. Subclasses implement :meth:`gain_at` and :meth:`stage_gains`."""

    #: finite horizon, or None when the controller is defined for every stage
    horizon: Optional[int] = None

    def gain_at(self, history) -> float:
        raise NotImplementedError

    def stage_gains(self, k: int, heads: np.ndarray) -> np.ndarray:
        """Vectorized :meth:`gain_at` for many stage-``k`` prefixes.

        ``heads`` is a boolean array of shape ``(m, k)`` (True = heads).
        """
        raise NotImplementedError

    def kq_gain(self, k: int, q: int) -> float:
        """Gain at stage ``k`` after ``q`` heads, for controllers that only see ``(k, q)``."""
        raise TypeError(f"{type(self).__name__} is not (stage, heads)-structured")

    @property
    def kq_structured(self) -> bool:
        return False

    def _check_stage(self, k: int) -> None:
        if self.horizon is not None and k >= self.horizon:
            raise ValueError(
                f"history of length {k} is past the horizon n={self.horizon}"
            )


@dataclass(frozen=True)
class StaticLinear(Controller):
    """Bet the same fraction ``gain`` of wealth at every stage."""

    gain: float

    def __post_init__(self):
        _check_gain(self.gain)

    def gain_at(self, history=()) -> float:
        return self.gain

    def stage_gains(self, k, heads):
        return np.full(np.shape(heads)[0], self.gain)

    def kq_gain(self, k, q):
        return self.gain

    @property
    def kq_structured(self):
        return True


@dataclass(frozen=True)
class PerfectKelly(StaticLinear):
    """Static linear controller tuned to a known heads probability ``p``."""

    p: float = 0.5


@dataclass(frozen=True)
class RobustTable(Controller):
    table: GainTable

    @property
    def horizon(self):
        return self.table.n

    def gain_at(self, history=()) -> float:
        h = parse_history(history)
        self._check_stage(len(h))
        return self.table.gain(len(h), sum(1 for x in h if x == 1))

    def stage_gains(self, k, heads):
        self._check_stage(k)
        row = np.asarray(self.table[k])
        return row[np.asarray(heads, dtype=bool).sum(axis=1)]

    def kq_gain(self, k, q):
        return self.table.gain(k, q)

    @property
    def kq_structured(self):
        return True


@dataclass(frozen=True)
class ExplicitTree(Controller):
    """One gain per tree node, ``2**n - 1`` in total.

    Nodes are stored stage by stage. Within stage ``k`` a node's offset is
    its history read as a ``k``-bit binary number, heads = 1, first flip
    as the most significant bit.
    """

    n: int
    gains: Tuple[float, ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("horizon n must be >= 1")
        if len(self.gains) != 2**self.n - 1:
            raise ValueError(f"expected {2**self.n - 1} gains, got {len(self.gains)}")
        for g in self.gains:
            _check_gain(g)

    @property
    def horizon(self):
        return self.n

    @staticmethod
    def node_index(history: Sequence[int]) -> int:
        k = len(history)
        offset = 0
        for x in history:
            offset = 2 * offset + (1 if x == 1 else 0)
        return (2**k - 1) + offset

    def gain_at(self, history=()) -> float:
        h = parse_history(history)
        self._check_stage(len(h))
        return self.gains[self.node_index(h)]

    def stage_gains(self, k, heads):
        self._check_stage(k)
        heads = np.asarray(heads, dtype=np.int64)
        weights = 2 ** np.arange(k - 1, -1, -1, dtype=np.int64)
        return np.asarray(self.gains)[(2**k - 1) + heads @ weights]

    def stage(self, k: int) -> Tuple[float, ...]:
        return self.gains[2**k - 1 : 2 ** (k + 1) - 1]


def all_histories(k: int):
    """Every length-``k`` history in node order (tails-first binary counting)."""
    for offset in range(2**k):
        yield tuple(1 if (offset >> (k - 1 - i)) & 1 else -1 for i in range(k))


def kelly_perfect(p: float) -> PerfectKelly:
    """Perfect-information Kelly bet ``2p - 1``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    return PerfectKelly(gain=2.0 * p - 1.0, p=float(p))


def static_linear_optimal(pset: UncertaintySet) -> StaticLinear:
    """Best constant gain for integrated ELG over ``pset``: twice the centroid minus one."""
    return StaticLinear(gain=2.0 * centroid(pset) - 1.0)


def robust_gain_table(pset: UncertaintySet, n: int) -> GainTable:
    if n < 1:
        raise ValueError("horizon n must be >= 1")
    moments = moment_table(pset, n)
    rows = []
    for k in range(n):
        row = []
        for q in range(k + 1):
            alpha = moments[q + 1, k - q]
            beta = moments[q, k - q + 1]
            diff = alpha - beta
            # differences below quadrature rounding are ties (symmetric sets)
            if abs(diff) <= _TIE_ULPS * _EPS * (alpha + beta):
                diff = 0.0
            gain = diff / (alpha + beta)
            # alpha, beta > 0 on a positive-measure set so the optimum is interior
            assert -1.0 < gain < 1.0, (k, q, gain)
            row.append(gain)
        rows.append(tuple(row))
    return GainTable(n=n, gains=tuple(rows), pset=pset)


def robust_optimal(pset: UncertaintySet, n: int) -> RobustTable:
    """Unique maximizer of integrated ELG over all admissible n-stage controllers.

    The gain after ``q`` heads in ``k`` flips is ``(alpha - beta) / (alpha + beta)``
    with ``alpha = I(q+1, k-q)`` and ``beta = I(q, k-q+1)``.
    """
    return RobustTable(robust_gain_table(pset, n))


def gain_at(controller: Controller, history) -> float:
    return controller.gain_at(history)


def as_explicit_tree(controller: Controller, n: int) -> ExplicitTree:
    """Expand any controller to its full ``2**n - 1`` node representation."""
    if n < 1:
        raise ValueError("horizon n must be >= 1")
    if controller.horizon is not None and controller.horizon < n:
        raise ValueError(f"controller horizon {controller.horizon} < requested n={n}")
    gains = []
    for k in range(n):
        offsets = np.arange(2**k)
        bits = (offsets[:, None] >> np.arange(k - 1, -1, -1)[None, :]) & 1
        gains.extend(float(g) for g in controller.stage_gains(k, bits.astype(bool)))
    return ExplicitTree(n=n, gains=tuple(gains))
