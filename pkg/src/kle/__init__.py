"""Nearest-neighbor differential entropy estimation.

Point estimates with asymptotic confidence intervals, bias-cancelling
extrapolation for d >= 4, Monte-Carlo evaluation of the variance constant
chi_d, and a zoo of reference densities with known entropies.
"""

from .chi_constant import CHI_CONSTANT_PART, CHI_TABLE, ChiEstimate, chi, chi_from_table
from .estimator import (
    EULER_GAMMA,
    EntropyEstimate,
    confidence_interval,
    entropy_point,
    estimate,
    variance_point,
)
from .geometry import (
    NormKind,
    ShellSpec,
    distance,
    intersection_volume,
    sample_shell,
    shell_volume,
    unit_ball_volume,
)
from .nn import (
    DuplicatePointsError,
    NNDistances,
    SampleSet,
    nn_bruteforce,
    nn_distances,
    nn_kdtree,
)
from .richardson import RichardsonPlan, estimate_extrapolated, inflation_factor, plan

__all__ = [
    "CHI_CONSTANT_PART",
    "CHI_TABLE",
    "ChiEstimate",
    "DuplicatePointsError",
    "EULER_GAMMA",
    "EntropyEstimate",
    "NNDistances",
    "NormKind",
    "RichardsonPlan",
    "SampleSet",
    "ShellSpec",
    "chi",
    "chi_from_table",
    "confidence_interval",
    "distance",
    "entropy_point",
    "estimate",
    "estimate_extrapolated",
    "inflation_factor",
    "intersection_volume",
    "nn_bruteforce",
    "nn_distances",
    "nn_kdtree",
    "plan",
    "sample_shell",
    "shell_volume",
    "unit_ball_volume",
    "variance_point",
]

__version__ = "0.1.0"
