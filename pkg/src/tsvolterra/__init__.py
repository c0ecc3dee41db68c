"""Volterra integral equations on time scales, with Hyers-Ulam stability certificates."""

from .calculus import (
    GridExponential,
    GridFunction,
    QuadratureWeights,
    bernoulli_gap,
    cumulative_integral,
    delta_integral,
    exp_identity_residual,
    ts_exp,
)
from .errors import *  # noqa: F401,F403
from .expr import evaluate, parse, to_string
from .stability import (
    GrowthRecord,
    PairCheck,
    StabilityCertificate,
    certify_hyers_ulam,
    certify_rassias,
    certify_rassias_horizons,
    check_rassias_condition,
    defect,
    instability_probe,
    pair_difference_check,
)
from .timescale import Grid, Interval, Point, PointClass, TimeScale, build_grid, classify, mu, sigma
from .volterra import (
    IterationReport,
    Solution,
    VolterraProblem,
    march_solve,
    picard_solve,
    quadrature_allowance,
    step_extend,
)

__version__ = "0.1.0"
