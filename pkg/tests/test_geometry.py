"""Geometry kernel: volumes, overlaps, shell sampling."""

import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.stats import kstest

from kle.geometry import (
    NormKind,
    ShellSpec,
    distance,
    intersection_volume,
    sample_shell,
    shell_volume,
    unit_ball_volume,
)

E = NormKind.EUCLIDEAN
C = NormKind.CHEBYSHEV


class TestUnitBallVolume:
    def test_euclidean_interval(self):
        assert unit_ball_volume(1, E) == pytest.approx(2.0, rel=1e-14)

    def test_euclidean_disc(self):
        assert unit_ball_volume(2, E) == pytest.approx(math.pi, rel=1e-14)

    def test_chebyshev_cube(self):
        assert unit_ball_volume(3, C) == 8.0

    @pytest.mark.parametrize("d", range(1, 25))
    def test_euclidean_recurrence(self, d):
        # v_d = v_{d-2} * 2*pi/d
        if d >= 3:
            assert unit_ball_volume(d, E) == pytest.approx(
                unit_ball_volume(d - 2, E) * 2.0 * math.pi / d, rel=1e-12
            )

    def test_zero_dimension_rejected(self):
        with pytest.raises(ValueError):
            unit_ball_volume(0, E)


class TestDistance:
    def test_345_triangle(self):
        assert distance((0, 0), (3, 4), E) == 5.0

    def test_chebyshev_max_coordinate(self):
        assert distance((0, 0), (3, 4), C) == 4.0

    def test_identity(self):
        x = np.array([1.3, -2.0, 0.7])
        assert distance(x, x, E) == 0.0
        assert distance(x, x, C) == 0.0

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            distance([0.0], [0.0, 1.0], E)


def _lens_area_2d(r, s, rho):
    """Independent closed form: two circular segments."""
    if rho >= r + s:
        return 0.0
    if rho <= abs(r - s):
        return math.pi * min(r, s) ** 2
    a = r * r * math.acos((rho * rho + r * r - s * s) / (2 * rho * r))
    b = s * s * math.acos((rho * rho + s * s - r * r) / (2 * rho * s))
    t = 0.5 * math.sqrt(
        (-rho + r + s) * (rho + r - s) * (rho - r + s) * (rho + r + s)
    )
    return a + b - t


def _lens_by_slabs(d, r, s, rho):
    """Quadrature oracle: integrate exact (d-1)-ball cross-sections along
    the center axis."""
    vd1 = unit_ball_volume(d - 1, E) if d > 1 else 1.0

    def cross_section(x):
        rad_sq = min(r * r - x * x, s * s - (x - rho) * (x - rho))
        if rad_sq <= 0.0:
            return 0.0
        return vd1 * rad_sq ** (0.5 * (d - 1))

    lo, hi = max(-r, rho - s), min(r, rho + s)
    if lo >= hi:
        return 0.0
    val, _ = quad(cross_section, lo, hi, epsabs=1e-12, epsrel=1e-10, limit=200)
    return val


class TestIntersectionVolume:
    def test_disjoint(self):
        y = np.zeros(4)
        y[0] = 3.0
        assert intersection_volume(1.0, 1.0, y, E) == 0.0
        assert intersection_volume(1.0, 1.0, y, C) == 0.0

    def test_unit_square_overlap(self):
        # two side-2 squares offset by (1,1) overlap on a unit square
        assert intersection_volume(1.0, 1.0, np.array([1.0, 1.0]), C) == pytest.approx(1.0)

    def test_equal_balls_distance_one_d3(self):
        # classic lens of two unit balls at center distance 1: 5*pi/12
        got = intersection_volume(1.0, 1.0, np.array([1.0, 0.0, 0.0]), E)
        assert got == pytest.approx(5.0 * math.pi / 12.0, rel=1e-12)

    def test_containment_gives_smaller_ball(self):
        got = intersection_volume(3.0, 1.0, np.array([0.5, 0.5]), E)
        assert got == pytest.approx(math.pi, rel=1e-12)

    def test_nonpositive_radius_rejected(self):
        with pytest.raises(ValueError):
            intersection_volume(0.0, 1.0, np.array([1.0]), E)

    @pytest.mark.parametrize("trial", range(40))
    def test_matches_2d_closed_form(self, trial):
        rng = np.random.default_rng(1000 + trial)
        r, s = rng.uniform(0.2, 3.0, size=2)
        rho = rng.uniform(0.0, r + s + 0.5)
        theta = rng.uniform(0, 2 * math.pi)
        y = rho * np.array([math.cos(theta), math.sin(theta)])
        got = intersection_volume(r, s, y, E)
        assert got == pytest.approx(_lens_area_2d(r, s, rho), rel=1e-9, abs=1e-12)

    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_matches_slab_quadrature(self, d):
        rng = np.random.default_rng(7 + d)
        for _ in range(25):
            r, s = rng.uniform(0.2, 2.5, size=2)
            rho = rng.uniform(0.0, r + s + 0.3)
            y = np.zeros(d)
            y[0] = rho
            got = intersection_volume(r, s, y, E)
            want = _lens_by_slabs(d, r, s, rho)
            assert got == pytest.approx(want, rel=1e-4, abs=1e-10)

    @pytest.mark.parametrize("norm", [E, C])
    @pytest.mark.parametrize("d", [1, 2, 4, 7])
    def test_symmetry_under_swap(self, norm, d):
        rng = np.random.default_rng(17 * d + (norm is C))
        for _ in range(30):
            r, s = rng.uniform(0.2, 2.0, size=2)
            y = rng.normal(size=d)
            a = intersection_volume(r, s, y, norm)
            b = intersection_volume(s, r, -y, norm)
            assert a == pytest.approx(b, rel=1e-12, abs=1e-300)

    @pytest.mark.parametrize("norm", [E, C])
    def test_bounded_by_smaller_ball(self, norm):
        rng = np.random.default_rng(3)
        for _ in range(60):
            d = int(rng.integers(1, 6))
            r, s = rng.uniform(0.2, 2.0, size=2)
            y = rng.normal(size=d) * rng.uniform(0, 2)
            vol = intersection_volume(r, s, y, norm)
            cap = unit_ball_volume(d, norm) * min(r, s) ** d
            assert vol <= cap * (1 + 1e-12)
            assert vol >= 0.0

    @pytest.mark.parametrize("norm", [E, C])
    def test_monotone_along_ray(self, norm):
        rng = np.random.default_rng(4)
        for _ in range(20):
            d = int(rng.integers(1, 5))
            r, s = rng.uniform(0.3, 1.5, size=2)
            direction = rng.normal(size=d)
            length = (
                np.linalg.norm(direction)
                if norm is E
                else np.max(np.abs(direction))
            )
            scales = np.linspace(0.0, (r + s) * 1.2, 25)
            vols = [
                intersection_volume(r, s, t * direction / length, norm)
                for t in scales
            ]
            assert all(a >= b - 1e-12 for a, b in zip(vols, vols[1:]))
            assert vols[-1] == 0.0


class TestShell:
    def test_volume_interval(self):
        assert shell_volume(ShellSpec(1.0, 2.0, 1, C)) == pytest.approx(2.0)

    def test_volume_square_annulus(self):
        assert shell_volume(ShellSpec(1.0, 2.0, 2, C)) == pytest.approx(12.0)

    def test_volume_disc_annulus(self):
        assert shell_volume(ShellSpec(1.0, 2.0, 2, E)) == pytest.approx(3.0 * math.pi)

    def test_bad_spec_rejected(self):
        with pytest.raises(ValueError):
            ShellSpec(2.0, 1.0, 2, E)
        with pytest.raises(ValueError):
            ShellSpec(-0.1, 1.0, 2, E)

    @pytest.mark.parametrize("norm", [E, C])
    @pytest.mark.parametrize("d", [1, 2, 3, 6])
    def test_support(self, norm, d):
        spec = ShellSpec(0.7, 1.9, d, norm)
        rng = np.random.default_rng(11)
        pts = np.array([sample_shell(spec, rng) for _ in range(2000)])
        if norm is E:
            radii = np.sqrt(np.sum(pts * pts, axis=1))
        else:
            radii = np.max(np.abs(pts), axis=1)
        assert np.all(radii > spec.inner)
        assert np.all(radii <= spec.outer)

    @pytest.mark.parametrize("norm", [E, C])
    def test_radial_cdf(self, norm):
        # empirical radii against the analytic CDF (x^d - t^d)/(R^d - t^d)
        d, t, outer = 3, 0.5, 2.0
        spec = ShellSpec(t, outer, d, norm)
        rng = np.random.default_rng(12)
        pts = np.array([sample_shell(spec, rng) for _ in range(100_000)])
        if norm is E:
            radii = np.sqrt(np.sum(pts * pts, axis=1))
        else:
            radii = np.max(np.abs(pts), axis=1)
        cdf = lambda x: (x**d - t**d) / (outer**d - t**d)
        stat = kstest(radii, cdf).statistic
        assert stat < 0.01

    def test_one_dimensional_sides_balanced(self):
        spec = ShellSpec(1.0, 2.0, 1, E)
        rng = np.random.default_rng(13)
        pts = np.array([sample_shell(spec, rng)[0] for _ in range(100_000)])
        assert np.all((np.abs(pts) > 1.0) & (np.abs(pts) <= 2.0))
        frac = np.mean(pts > 0)
        assert abs(frac - 0.5) < 0.01

    @pytest.mark.parametrize("norm", [E, C])
    def test_odd_moment_vanishes(self, norm):
        spec = ShellSpec(0.3, 1.1, 4, norm)
        rng = np.random.default_rng(14)
        pts = np.array([sample_shell(spec, rng) for _ in range(50_000)])
        mean = pts.mean(axis=0)
        se = pts.std(axis=0) / math.sqrt(len(pts))
        assert np.all(np.abs(mean) < 4 * se + 1e-3)
