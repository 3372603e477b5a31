"""Robust nonlinear Kelly betting on a coin whose bias is only known to lie in a set."""

from .controller import (
    Controller,
    ExplicitTree,
    GainTable,
    PerfectKelly,
    RobustTable,
    StaticLinear,
    as_explicit_tree,
    gain_at,
    kelly_perfect,
    robust_optimal,
    static_linear_optimal,
)
from .elg import (
    NEG_INF,
    ElgCurve,
    elg_at,
    elg_curve,
    elg_star,
    err_integral,
    integrated_elg,
)
from .moments import MomentTable, moment, moment_table
from .simulate import SimConfig, SimReport, run_simulation, single_path
from .uncertainty import (
    InvalidUncertaintySet,
    UncertaintySet,
    centroid,
    make_uncertainty_set,
    measure,
    parse_uncertainty_set,
)

__version__ = "0.1.0"

_ESTIMATORS = ("PerfectKellyBettor", "RobustKellyBettor", "StaticLinearBettor")


def __getattr__(name):
    # scikit-learn is slow to import; only pay for it when an estimator is used
    if name in _ESTIMATORS:
        from . import estimators

        return getattr(estimators, name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
