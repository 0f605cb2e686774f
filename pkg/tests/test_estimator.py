"""Point estimator, variance estimator, and confidence intervals."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import expon, kstest

from kle.estimator import (
    EULER_GAMMA,
    confidence_interval,
    entropy_point,
    estimate,
    variance_point,
)
from kle.densities import Gaussian
from kle.geometry import NormKind, unit_ball_volume
from kle.nn import DuplicatePointsError, SampleSet, nn_bruteforce, nn_distances

E = NormKind.EUCLIDEAN
C = NormKind.CHEBYSHEV

CHI_1 = 2.14  # bundled reference value for d=1


def _nn(points, norm=E):
    return nn_bruteforce(SampleSet(np.asarray(points, dtype=float), norm))


class TestEntropyPoint:
    def test_two_points(self):
        h = entropy_point(_nn([[0.0], [1.0]]), 1, E)
        assert h == pytest.approx(EULER_GAMMA + math.log(2.0), rel=1e-15)

    def test_three_points_hand_value(self):
        h = entropy_point(_nn([[0.0], [1.0], [3.0]]), 1, E)
        want = (math.log(2) + math.log(2) + math.log(4)) / 3 + EULER_GAMMA + math.log(2)
        assert h == pytest.approx(want, rel=1e-15)
        assert h == pytest.approx(2.19459, abs=5e-6)

    def test_duplicates_rejected(self):
        with pytest.raises(DuplicatePointsError):
            entropy_point(_nn([[0.0], [0.0], [1.0]]), 1, E)

    def test_exponential_consistency(self):
        rng = np.random.default_rng(100)
        x = rng.exponential(size=(100_000, 1))
        h = entropy_point(nn_distances(SampleSet(x, E)), 1, E)
        assert abs(h - 1.0) < 0.02

    def test_translation_invariance_exact(self):
        rng = np.random.default_rng(101)
        pts = rng.normal(size=(500, 3))
        shift = np.array([10.0, -4.0, 2.0])
        h0 = entropy_point(_nn(pts), 3, E)
        h1 = entropy_point(_nn(pts + shift), 3, E)
        assert h0 == h1

    def test_scaling_covariance_chebyshev_exact(self):
        rng = np.random.default_rng(102)
        pts = rng.normal(size=(400, 2))
        lam = 4.0  # powers of two scale floats exactly
        h0 = entropy_point(_nn(pts, C), 2, C)
        h1 = entropy_point(_nn(lam * pts, C), 2, C)
        assert h1 == pytest.approx(h0 + 2 * math.log(lam), abs=1e-12)

    def test_scaling_covariance_euclidean(self):
        rng = np.random.default_rng(103)
        pts = rng.normal(size=(400, 3))
        lam = 0.37
        h0 = entropy_point(_nn(pts), 3, E)
        h1 = entropy_point(_nn(lam * pts), 3, E)
        assert h1 == pytest.approx(h0 + 3 * math.log(lam), abs=1e-10)

    def test_norm_consistency_d1(self):
        rng = np.random.default_rng(104)
        pts = rng.normal(size=(300, 1))
        h_e = entropy_point(_nn(pts, E), 1, E)
        h_c = entropy_point(_nn(pts, C), 1, C)
        assert h_e == pytest.approx(h_c, abs=1e-12)


class TestVariancePoint:
    def test_hand_value(self):
        v, clamped = variance_point(_nn([[0.0], [1.0], [3.0]]), chi_d=CHI_1)
        logs = np.log([2.0, 2.0, 4.0])
        want = logs.var() + CHI_1 - math.pi**2 / 6
        assert not clamped
        assert v == pytest.approx(want, rel=1e-12)
        assert v == pytest.approx(0.6018, abs=2e-4)

    def test_equal_gaps_leave_only_constant(self):
        v, clamped = variance_point(_nn([[0.0], [1.0]]), chi_d=CHI_1)
        assert not clamped
        assert v == pytest.approx(CHI_1 - math.pi**2 / 6, rel=1e-12)

    def test_negative_clamped(self):
        # chi below pi^2/6 forces a negative value at zero sample variance
        v, clamped = variance_point(_nn([[0.0], [1.0]]), chi_d=0.0)
        assert clamped and v == 0.0

    def test_gaussian_reference(self):
        rng = np.random.default_rng(105)
        x = rng.standard_normal((100_000, 1))
        v, _ = variance_point(nn_distances(SampleSet(x, E)), chi_d=CHI_1)
        assert abs(v - (0.5 + CHI_1)) < 0.05

    def test_translation_and_scale_invariance(self):
        rng = np.random.default_rng(106)
        pts = rng.normal(size=(400, 2))
        v0, _ = variance_point(_nn(pts, C), chi_d=CHI_1)
        v1, _ = variance_point(_nn(4.0 * pts + 7.0, C), chi_d=CHI_1)
        assert v1 == pytest.approx(v0, abs=1e-12)


class TestConfidenceInterval:
    def test_zero_variance_degenerate(self):
        assert confidence_interval(1.0, 0.0, 100, 1.0, 0.05) == (1.0, 1.0)

    def test_standard_normal_quantile(self):
        lo, hi = confidence_interval(0.0, 1.0, 100, 1.0, 0.05)
        assert hi == pytest.approx(1.959964 / 10.0, abs=1e-6)
        assert lo == -hi

    def test_inflation_scales_width(self):
        lo1, hi1 = confidence_interval(0.0, 1.0, 50, 1.0, 0.05)
        lo4, hi4 = confidence_interval(0.0, 1.0, 50, 4.0, 0.05)
        assert hi4 == pytest.approx(2.0 * hi1, rel=1e-12)

    def test_alpha_validated(self):
        with pytest.raises(ValueError):
            confidence_interval(0.0, 1.0, 10, 1.0, 0.0)
        with pytest.raises(ValueError):
            confidence_interval(0.0, 1.0, 10, 1.0, 1.0)

    @given(
        h=st.floats(-5, 5),
        v=st.floats(0, 10),
        n=st.integers(1, 10**6),
        alpha=st.floats(0.001, 0.999),
        inflation=st.floats(0.1, 100),
    )
    @settings(max_examples=200, deadline=None)
    def test_interval_properties(self, h, v, n, alpha, inflation):
        lo, hi = confidence_interval(h, v, n, inflation, alpha)
        assert lo <= h <= hi
        half = math.sqrt(inflation * v / n)
        assert hi - h == pytest.approx(h - lo, rel=1e-9, abs=1e-12)
        # wider nominal level -> wider interval
        lo2, hi2 = confidence_interval(h, v, n, inflation, alpha / 2)
        assert hi2 >= hi - 1e-12


class TestEstimatePipeline:
    def test_fields_consistent(self):
        rng = np.random.default_rng(107)
        s = SampleSet(rng.standard_normal((2000, 2)), E)
        est = estimate(s, chi_d=2.29, alpha=0.1)
        assert est.n == 1999 and est.d == 2
        assert est.ci_low <= est.h <= est.ci_high
        assert est.chi_d_used == 2.29
        assert est.inflation == 1.0

    def test_exp_limit_distribution(self):
        # v_d * f(X_i) * Y_i is approximately Exp(1) for large N
        model = Gaussian(1)
        rng = np.random.default_rng(108)
        x = model.sample(100_000, rng)
        nn = nn_distances(SampleSet(x, E))
        y = nn.n * nn.r ** 1
        v1 = unit_ball_volume(1, E)
        z = v1 * np.exp(model.log_density(x)) * y
        assert kstest(z, expon.cdf).statistic < 0.01
