"""Bias-cancelling extrapolation for dimensions 4 and up.

The plain estimator's bias expands in powers of N^(-2/d), so a linear
combination of estimates on disjoint sub-samples of sizes n, 2n, ..., 2^l n
with coefficients chosen to kill the first l powers has bias o(N^(-1/2)).
The price is a variance inflation factor a_d, which is large; both the
plain and extrapolated estimators stay available so callers can compare.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .estimator import EntropyEstimate, confidence_interval, entropy_point, variance_point
from .nn import SampleSet, nn_distances

SUM_TOL = 1e-12
ORTHO_TOL = 1e-10


def extrapolation_order(d: int) -> int:
    """Number of cancelled bias terms: floor(d/4), so 0 for d <= 3."""
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    return d // 4


@dataclass(frozen=True)
class RichardsonPlan:
    """Coefficients and sub-sample sizes for one extrapolated estimate."""

    d: int
    ell: int
    alphas: np.ndarray
    n: int
    subsample_sizes: tuple[int, ...] = field(default=())
    a_d: float = 1.0

    def __post_init__(self):
        alphas = np.asarray(self.alphas, dtype=np.float64)
        object.__setattr__(self, "alphas", alphas)
        if alphas.shape != (self.ell + 1,):
            raise ValueError(f"need {self.ell + 1} coefficients, got {alphas.shape}")
        if abs(alphas.sum() - 1.0) > SUM_TOL:
            raise ValueError(f"coefficients must sum to 1, got {alphas.sum()!r}")
        nodes = 2.0 ** (2.0 * np.arange(self.ell + 1) / self.d)
        for i in range(1, self.ell + 1):
            resid = float(np.dot(alphas, nodes**i))
            if abs(resid) > ORTHO_TOL:
                raise ValueError(f"order-{i} cancellation violated: residual {resid}")
        expected = tuple(2 ** (self.ell - k) * self.n + 1 for k in range(self.ell + 1))
        if self.subsample_sizes != expected:
            raise ValueError(
                f"sizes {self.subsample_sizes} inconsistent with n={self.n}"
            )

    @property
    def total_points(self) -> int:
        return sum(self.subsample_sizes)


def _solve_alphas(d: int, ell: int) -> np.ndarray:
    """Solve sum_k a_k = 1, sum_k a_k 2^(2ki/d) = 0 for i = 1..ell.

    The matrix is a transposed Vandermonde in the nodes 2^(2k/d); at
    ell <= 6 a direct pivoted solve is plenty.
    """
    nodes = 2.0 ** (2.0 * np.arange(ell + 1) / d)
    mat = np.vander(nodes, ell + 1, increasing=True).T
    rhs = np.zeros(ell + 1)
    rhs[0] = 1.0
    return np.linalg.solve(mat, rhs)


def inflation_factor(plan: RichardsonPlan) -> float:
    """Variance inflation a_d of the extrapolated estimator."""
    return plan.a_d


def plan(d: int, n_of_sample: int) -> RichardsonPlan:
    """Build the extrapolation plan for dimension d and sample size N+1.

    ``n_of_sample`` is N (one less than the number of points).  For
    d <= 3 the plan is the identity: one block holding the whole sample
    and a_d = 1.
    """
    ell = extrapolation_order(d)
    big_n = n_of_sample
    if big_n < max(ell, 1):
        raise ValueError(f"N={big_n} too small for dimension {d}")
    # largest n with sum_k (2^k n + 1) <= N+1, so the blocks stay disjoint
    n = (big_n - ell) // (2 ** (ell + 1) - 1)
    if n < 1:
        raise ValueError(
            f"N={big_n} cannot be split into {ell + 1} blocks of >= 2 points"
        )
    alphas = np.array([1.0]) if ell == 0 else _solve_alphas(d, ell)
    sizes = tuple(2 ** (ell - k) * n + 1 for k in range(ell + 1))
    a_d = float((2.0 - 2.0**-ell) * np.sum(alphas**2 * 2.0 ** np.arange(ell + 1)))
    return RichardsonPlan(
        d=d, ell=ell, alphas=alphas, n=n, subsample_sizes=sizes, a_d=a_d
    )


def estimate_extrapolated(
    s: SampleSet,
    richardson_plan: RichardsonPlan,
    rng: np.random.Generator,
    chi_d: float,
    alpha: float = 0.05,
) -> EntropyEstimate:
    """Extrapolated estimate: split, estimate per block, combine.

    The sample rows are permuted once (seeded by ``rng``), consecutive
    disjoint blocks of the planned sizes are carved off in decreasing
    order, and leftovers are discarded.  The variance estimate comes from
    the largest block; the interval uses the full-sample N with the a_d
    inflation.
    """
    if richardson_plan.d != s.dim:
        raise ValueError(f"plan is for d={richardson_plan.d}, sample has d={s.dim}")
    if richardson_plan.total_points > s.n_points:
        raise ValueError(
            f"plan needs {richardson_plan.total_points} points, sample has {s.n_points}"
        )
    big_n = s.n_points - 1
    if richardson_plan.ell == 0:
        nn = nn_distances(s)
        h = entropy_point(nn, s.dim, s.norm)
        v, clamped = variance_point(nn, chi_d)
    else:
        perm = rng.permutation(s.n_points)
        h = 0.0
        v, clamped = 0.0, False
        start = 0
        for k, size in enumerate(richardson_plan.subsample_sizes):
            block = SampleSet(s.points[perm[start : start + size]], s.norm)
            start += size
            nn = nn_distances(block)
            h_k = entropy_point(nn, s.dim, s.norm)
            h += float(richardson_plan.alphas[k]) * h_k
            if k == 0:
                v, clamped = variance_point(nn, chi_d)
    lo, hi = confidence_interval(h, v, big_n, richardson_plan.a_d, alpha)
    return EntropyEstimate(
        h=h,
        v=v,
        n=big_n,
        d=s.dim,
        norm=s.norm,
        ci_low=lo,
        ci_high=hi,
        alpha=alpha,
        inflation=richardson_plan.a_d,
        chi_d_used=chi_d,
        v_clamped=clamped,
    )
