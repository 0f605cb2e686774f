"""The nearest-neighbor entropy point estimator, its variance estimator,
and normal-theory confidence intervals.

The point estimate is the sample mean of log Y_i (Y_i = N R_i^d) plus the
Euler constant plus log v_d.  Its asymptotic variance splits into
Var(log f(X)) plus a norm/dimension constant chi_d; the plug-in variance
estimator is the sample variance of log Y_i plus (chi_d - pi^2/6).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .geometry import NormKind, unit_ball_volume
from .nn import DuplicatePointsError, NNDistances, SampleSet, nn_distances

EULER_GAMMA = 0.57721566490153286061


@dataclass(frozen=True)
class EntropyEstimate:
    """Point estimate (nats), variance estimate, and confidence interval."""

    h: float
    v: float
    n: int
    d: int
    norm: NormKind
    ci_low: float
    ci_high: float
    alpha: float
    inflation: float
    chi_d_used: float
    v_clamped: bool = False


def _require_no_duplicates(nn: NNDistances):
    if nn.duplicate_count:
        raise DuplicatePointsError(
            f"{nn.duplicate_count} points have a zero nearest-neighbor "
            "distance; coincident points violate the continuous-density model"
        )


def entropy_point(nn: NNDistances, d: int, norm: NormKind) -> float:
    """Entropy point estimate in nats: mean(log Y) + gamma + log v_d."""
    _require_no_duplicates(nn)
    return float(np.mean(nn.log_y) + EULER_GAMMA + math.log(unit_ball_volume(d, norm)))


def variance_point(nn: NNDistances, chi_d: float) -> tuple[float, bool]:
    """Plug-in estimate of the asymptotic variance of sqrt(N)*(H_N - H).

    Returns (value, clamped).  The population value is nonnegative, but the
    plug-in can dip below zero at small N; it is then clamped to 0 and
    flagged.
    """
    _require_no_duplicates(nn)
    mean = float(np.mean(nn.log_y))
    second = float(np.mean(nn.log_y**2))
    v = second - mean * mean + chi_d - math.pi**2 / 6.0
    if v < 0.0:
        return 0.0, True
    return v, False


def confidence_interval(
    h: float, v: float, n: int, inflation: float, alpha: float
) -> tuple[float, float]:
    """Symmetric normal interval h +- z_{1-alpha/2} * sqrt(inflation*v/n)."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0,1), got {alpha}")
    if v < 0.0:
        raise ValueError(f"variance must be nonnegative, got {v}")
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    z = ndtri(1.0 - alpha / 2.0)
    half = z * math.sqrt(inflation * v / n)
    return h - half, h + half


def estimate(
    s: SampleSet,
    chi_d: float,
    alpha: float = 0.05,
    force_bruteforce: bool = False,
) -> EntropyEstimate:
    """Full plain-estimator pipeline on one sample.

    chi_d must be supplied explicitly (from the bundled table or a
    Monte-Carlo run); there is no silent default.
    """
    nn = nn_distances(s, force_bruteforce=force_bruteforce)
    h = entropy_point(nn, s.dim, s.norm)
    v, clamped = variance_point(nn, chi_d)
    lo, hi = confidence_interval(h, v, nn.n, 1.0, alpha)
    return EntropyEstimate(
        h=h,
        v=v,
        n=nn.n,
        d=s.dim,
        norm=s.norm,
        ci_low=lo,
        ci_high=hi,
        alpha=alpha,
        inflation=1.0,
        chi_d_used=chi_d,
        v_clamped=clamped,
    )
