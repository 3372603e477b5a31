"""scikit-learn style wrappers around the betting controllers.

The estimators are configured by an uncertainty set rather than trained on
data: ``fit`` builds the policy, ``predict`` maps observed flip histories to
bet fractions, ``score`` is the integrated expected log growth over the set.
``X`` in ``fit`` is accepted and ignored so the objects drop into pipelines
and ``clone``/``get_params`` work as usual.
"""

from __future__ import annotations

from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .controller import (
    Controller,
    kelly_perfect,
    parse_history,
    robust_optimal,
    static_linear_optimal,
)
from .elg import elg_at, err_integral, integrated_elg
from .uncertainty import UncertaintySet, make_uncertainty_set, parse_uncertainty_set


def check_pset(pset) -> UncertaintySet:
    """Accept an UncertaintySet, a ``"lo:hi,..."`` string or a list of pairs."""
    if isinstance(pset, UncertaintySet):
        return pset
    if isinstance(pset, str):
        return parse_uncertainty_set(pset)
    return make_uncertainty_set(pset)


def check_n_steps(n_steps) -> int:
    if isinstance(n_steps, bool) or not isinstance(n_steps, (int, np.integer)):
        raise TypeError(f"n_steps must be an int, got {type(n_steps).__name__}")
    if n_steps < 1:
        raise ValueError(f"n_steps must be >= 1, got {n_steps}")
    return int(n_steps)


def check_histories(X, max_length: Optional[int] = None):
    """Validate a batch of flip histories.

    ``X`` is either a 2-D array over {-1, +1} (one history per row, all the
    same length) or an iterable of histories (``"HTH"`` strings or
    sequences over {-1, +1}). Returns a list of tuples.
    """
    if isinstance(X, np.ndarray):
        if X.ndim != 2:
            raise ValueError(f"expected a 2-D array of histories, got shape {X.shape}")
        histories = [parse_history(row) for row in X.tolist()]
    elif isinstance(X, str):
        raise ValueError("pass a list of histories, not a single string")
    else:
        histories = [parse_history(h) for h in X]
    if max_length is not None:
        for h in histories:
            if len(h) > max_length:
                raise ValueError(
                    f"history of length {len(h)} exceeds the last stage {max_length}"
                )
    return histories


class _BettorMixin:
    """Shared predict/score behaviour; subclasses set ``controller_`` in ``fit``."""

    def _max_history(self) -> Optional[int]:
        n = getattr(self, "n_steps", None)
        return None if n is None else n - 1

    def predict(self, X) -> np.ndarray:
        """Bet fraction (positive = heads) for each history in ``X``."""
        check_is_fitted(self, "controller_")
        histories = check_histories(X, self._max_history())
        return np.array([self.controller_.gain_at(h) for h in histories], dtype=float)

    def bet_size(self, X, wealth) -> np.ndarray:
        """Signed stake ``gain * wealth`` for each history."""
        wealth = np.asarray(wealth, dtype=float)
        if np.any(wealth < 0):
            raise ValueError("wealth must be nonnegative")
        return self.predict(X) * wealth

    def elg(self, p) -> np.ndarray:
        """Expected log growth at one or more heads probabilities."""
        check_is_fitted(self, "controller_")
        p = np.atleast_1d(np.asarray(p, dtype=float))
        return np.array([elg_at(self.controller_, self._horizon(), v) for v in p])

    def score(self, X=None, y=None) -> float:
        """Integrated expected log growth over the uncertainty set."""
        check_is_fitted(self, "controller_")
        return integrated_elg(self.controller_, self._horizon(), self.pset_)

    def regret(self) -> float:
        check_is_fitted(self, "controller_")
        return err_integral(self.controller_, self._horizon(), self.pset_)

    def _horizon(self) -> int:
        return self.n_steps


class RobustKellyBettor(_BettorMixin, BaseEstimator):
    """Optimal robust nonlinear bettor over ``n_steps`` flips.

    Parameters
    ----------
    pset : str, UncertaintySet or list of (lo, hi)
        Set known to contain the heads probability.
    n_steps : int
        Number of flips in the game.

    Attributes
    ----------
    pset_ : UncertaintySet
    controller_ : RobustTable
    gain_table_ : GainTable
    n_gains_ : int
        Distinct gains stored, ``n_steps * (n_steps + 1) / 2``.
    """

    def __init__(self, pset="0:1", n_steps=2):
        self.pset = pset
        self.n_steps = n_steps

    def fit(self, X=None, y=None):
        self.pset_ = check_pset(self.pset)
        n = check_n_steps(self.n_steps)
        self.controller_ = robust_optimal(self.pset_, n)
        self.gain_table_ = self.controller_.table
        self.n_gains_ = self.gain_table_.n_entries
        return self


class StaticLinearBettor(_BettorMixin, BaseEstimator):
    """Best constant-fraction bettor for the uncertainty set."""

    def __init__(self, pset="0:1", n_steps=1):
        self.pset = pset
        self.n_steps = n_steps

    def _max_history(self):
        return None

    def fit(self, X=None, y=None):
        self.pset_ = check_pset(self.pset)
        check_n_steps(self.n_steps)
        self.controller_: Controller = static_linear_optimal(self.pset_)
        self.gain_ = self.controller_.gain
        return self


class PerfectKellyBettor(_BettorMixin, BaseEstimator):
    """Classical Kelly bettor for a known heads probability ``p``.

    ``pset`` only matters for :meth:`score` and :meth:`regret`.
    """

    def __init__(self, p=0.5, pset="0:1", n_steps=1):
        self.p = p
        self.pset = pset
        self.n_steps = n_steps

    def _max_history(self):
        return None

    def fit(self, X=None, y=None):
        self.pset_ = check_pset(self.pset)
        check_n_steps(self.n_steps)
        self.controller_ = kelly_perfect(self.p)
        self.gain_ = self.controller_.gain
        return self
