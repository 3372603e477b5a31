"""Monte Carlo simulation of the wealth recursion ``V[k+1] = (1 + K_k X_k) V[k]``.

Randomness comes from numpy's Philox-4x64 counter-based generator keyed by
the seed. Trial ``t`` consumes stream words ``t*n .. t*n + n - 1``, so each
trial's flips depend only on ``(seed, t)`` and any block of trials can be
regenerated on its own. A flip is heads iff ``word / 2**64 < p_true``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numpy.random import Philox

from .controller import Controller, format_number, parse_history

GENERATOR = "numpy.random.Philox(4x64, 10 rounds); key=seed; trial t uses words t*n..t*n+n-1"

# multiple of 4 so every block starts on a Philox counter boundary
_BLOCK_TRIALS = 1 << 16


@dataclass(frozen=True)
class SimConfig:
    controller: Controller
    n: int
    p_true: float
    trials: int = 1
    v0: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.p_true <= 1.0:
            raise ValueError(f"p_true must lie in [0, 1], got {self.p_true}")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.v0 > 0:
            raise ValueError("initial wealth v0 must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.controller.horizon is not None and self.controller.horizon < self.n:
            raise ValueError(
                f"controller horizon {self.controller.horizon} is shorter than n={self.n}"
            )


@dataclass
class SimReport:
    trials: int
    n: int
    p_true: float
    seed: int
    v0: float
    mean_log_growth: float
    mean_log_growth_surviving: float
    stderr_log_growth: float
    min_final_wealth: float
    max_final_wealth: float
    ruin_count: int
    generator: str = GENERATOR
    log_growths: Optional[np.ndarray] = field(default=None, repr=False)
    final_wealth: Optional[np.ndarray] = field(default=None, repr=False)

    def to_dict(self) -> dict:
        keys = (
            "trials", "n", "p_true", "seed", "v0", "mean_log_growth",
            "mean_log_growth_surviving", "stderr_log_growth", "min_final_wealth",
            "max_final_wealth", "ruin_count", "generator",
        )
        return {k: getattr(self, k) for k in keys}

    def to_json(self, **meta) -> str:
        """JSON report; ``meta`` entries (e.g. pset) are written first."""
        items = {**meta, **self.to_dict()}
        payload = {
            k: (format_number(v) if isinstance(v, float) and math.isinf(v) else v)
            for k, v in items.items()
        }
        return json.dumps(payload, indent=2) + "\n"

    def to_text(self, **meta) -> str:
        lines = []
        for k, v in {**meta, **self.to_dict()}.items():
            lines.append(f"{k}: {format_number(v) if isinstance(v, float) else v}")
        return "\n".join(lines) + "\n"

    def trials_csv(self) -> str:
        if self.log_growths is None or self.final_wealth is None:
            raise ValueError("per-trial data not kept; rerun with keep_trials=True")
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["trial", "final_wealth", "log_growth"])
        for t, (w, g) in enumerate(zip(self.final_wealth, self.log_growths)):
            writer.writerow([t, format_number(float(w)), format_number(float(g))])
        return buf.getvalue()


def _heads_threshold(p: float) -> Optional[int]:
    """Smallest integer ``c`` with ``word < c  <=>  word / 2**64 < p``; None = always heads."""
    # p * 2**64 is exact in binary floating point
    c = math.ceil(p * 2.0**64)
    return None if c >= 2**64 else c


def draw_flips(seed: int, n: int, start: int, count: int, p_true: float) -> np.ndarray:
    """Boolean ``(count, n)`` heads matrix for trials ``start .. start+count-1``."""
    first_word = start * n
    counter, skip = divmod(first_word, 4)
    words = Philox(key=seed, counter=counter).random_raw(skip + count * n)[skip:]
    threshold = _heads_threshold(p_true)
    if threshold is None:
        heads = np.ones(words.shape, dtype=bool)
    else:
        heads = words < np.uint64(threshold)
    return heads.reshape(count, n)


def _play(controller: Controller, heads: np.ndarray, v0: float):
    m, n = heads.shape
    signs = np.where(heads, 1.0, -1.0)
    wealth = np.full(m, float(v0))
    logs = np.zeros(m)
    with np.errstate(divide="ignore"):
        for k in range(n):
            factor = 1.0 + controller.stage_gains(k, heads[:, :k]) * signs[:, k]
            wealth *= factor
            logs += np.log(factor)
    return wealth, logs / n


def run_simulation(cfg: SimConfig, keep_trials: bool = False) -> SimReport:
    """Simulate ``cfg.trials`` independent games and aggregate log growth."""
    wealth_blocks, log_blocks = [], []
    for start in range(0, cfg.trials, _BLOCK_TRIALS):
        count = min(_BLOCK_TRIALS, cfg.trials - start)
        heads = draw_flips(cfg.seed, cfg.n, start, count, cfg.p_true)
        wealth, logs = _play(cfg.controller, heads, cfg.v0)
        wealth_blocks.append(wealth)
        log_blocks.append(logs)
    wealth = np.concatenate(wealth_blocks)
    logs = np.concatenate(log_blocks)

    ruined = wealth <= 0.0
    ruin_count = int(ruined.sum())
    surviving = logs[~ruined]
    if surviving.size:
        mean_surv = math.fsum(surviving) / surviving.size
    else:
        mean_surv = float("nan")
    if surviving.size > 1:
        var = math.fsum((surviving - mean_surv) ** 2) / (surviving.size - 1)
        stderr = math.sqrt(var / surviving.size)
    else:
        stderr = 0.0

    return SimReport(
        trials=cfg.trials,
        n=cfg.n,
        p_true=float(cfg.p_true),
        seed=int(cfg.seed),
        v0=float(cfg.v0),
        mean_log_growth=float("-inf") if ruin_count else mean_surv,
        mean_log_growth_surviving=mean_surv,
        stderr_log_growth=stderr,
        min_final_wealth=float(wealth.min()),
        max_final_wealth=float(wealth.max()),
        ruin_count=ruin_count,
        log_growths=logs if keep_trials else None,
        final_wealth=wealth if keep_trials else None,
    )


def single_path(controller: Controller, path, v0: float = 1.0) -> np.ndarray:
    """Wealth trajectory ``V_0 .. V_n`` along one fixed sample path."""
    if not v0 > 0:
        raise ValueError("initial wealth v0 must be positive")
    flips = parse_history(path)
    values = [float(v0)]
    for k, x in enumerate(flips):
        values.append(values[-1] * (1.0 + controller.gain_at(flips[:k]) * x))
    return np.asarray(values)
