"""Norm geometry: ball volumes, two-ball intersections, shell sampling.

Everything here is exact (up to special-function evaluation), which is what
makes the Monte-Carlo pieces built on top of it unbiased for both supported
norms.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import betainc, gammaln


class NormKind(enum.Enum):
    """The two norms with tabulated constants: l2 and the max norm."""

    EUCLIDEAN = "l2"
    CHEBYSHEV = "linf"


def unit_ball_volume(d: int, norm: NormKind) -> float:
    """Volume of the unit ball of ``norm`` in dimension ``d``.

    Euclidean balls use pi^(d/2) / Gamma(d/2 + 1); Chebyshev balls are
    cubes of side 2, so the volume is 2^d.
    """
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    if norm is NormKind.CHEBYSHEV:
        return float(2.0**d)
    return float(math.exp(0.5 * d * math.log(math.pi) - gammaln(0.5 * d + 1.0)))


def distance(x, y, norm: NormKind) -> float:
    """Distance between two vectors under ``norm``."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {y.shape}")
    diff = x - y
    if norm is NormKind.CHEBYSHEV:
        return float(np.max(np.abs(diff))) if diff.size else 0.0
    return float(np.sqrt(np.sum(diff * diff)))


def _cap_volume(d: int, radius, plane):
    """Volume of {x in B(0, radius) : x_1 > plane}, vectorized.

    ``plane`` may be negative (cap larger than a half-ball); the formula is
    the regularized incomplete beta function on the chord parameter.
    """
    radius = np.asarray(radius, dtype=np.float64)
    plane = np.asarray(plane, dtype=np.float64)
    full = unit_ball_volume(d, NormKind.EUCLIDEAN) * radius**d
    frac = np.clip(plane / radius, -1.0, 1.0)
    half = 0.5 * full * betainc(0.5 * (d + 1), 0.5, 1.0 - frac * frac)
    return np.where(plane >= 0.0, half, full - half)


def _intersection_volume_euclidean(d: int, r, s, rho):
    """Lens volume of B(0,r) and B(c,s) with |c|_2 = rho, vectorized.

    Split the lens along the plane through the sphere-sphere intersection
    and add the two spherical caps.
    """
    r, s, rho = np.atleast_1d(*np.broadcast_arrays(
        np.asarray(r, dtype=np.float64),
        np.asarray(s, dtype=np.float64),
        np.asarray(rho, dtype=np.float64),
    ))
    vd = unit_ball_volume(d, NormKind.EUCLIDEAN)

    out = np.zeros(rho.shape, dtype=np.float64)
    contained = rho <= np.abs(r - s)
    out[contained] = vd * np.minimum(r, s)[contained] ** d

    lens = (~contained) & (rho < r + s)
    if np.any(lens):
        rl, sl, dl = r[lens], s[lens], rho[lens]
        x1 = (dl * dl + rl * rl - sl * sl) / (2.0 * dl)
        out[lens] = _cap_volume(d, rl, x1) + _cap_volume(d, sl, dl - x1)
    return out


def _intersection_volume_chebyshev(r, s, y):
    """Overlap of the cubes B(0,r) and B(y,s); a product of 1-d overlaps.

    ``y`` has shape (..., d); ``r`` and ``s`` broadcast against y[..., 0].
    """
    y = np.asarray(y, dtype=np.float64)
    r = np.asarray(r, dtype=np.float64)[..., None]
    s = np.asarray(s, dtype=np.float64)[..., None]
    length = np.minimum(r, y + s) - np.maximum(-r, y - s)
    return np.prod(np.maximum(length, 0.0), axis=-1)


def intersection_volume(r: float, s: float, y, norm: NormKind) -> float:
    """Volume of B(0,r) with B(y,s) under ``norm``.

    Chebyshev overlaps factor per coordinate and are exact in closed form.
    Euclidean overlaps are two hyperspherical caps evaluated through the
    regularized incomplete beta function; boundary cases (tangency,
    containment) are classified by exact comparison, no epsilons.
    """
    if r <= 0.0 or s <= 0.0:
        raise ValueError(f"radii must be positive, got r={r}, s={s}")
    y = np.atleast_1d(np.asarray(y, dtype=np.float64))
    d = y.shape[-1]
    if norm is NormKind.CHEBYSHEV:
        return float(_intersection_volume_chebyshev(r, s, y))
    rho = math.sqrt(float(np.sum(y * y)))
    if rho >= r + s:
        return 0.0
    return float(_intersection_volume_euclidean(d, r, s, rho)[0])


@dataclass(frozen=True)
class ShellSpec:
    """Annulus {y : inner < |y| <= outer} in dimension ``dim`` of ``norm``."""

    inner: float
    outer: float
    dim: int
    norm: NormKind

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"dimension must be >= 1, got {self.dim}")
        if not 0.0 <= self.inner < self.outer:
            raise ValueError(
                f"need 0 <= inner < outer, got inner={self.inner}, outer={self.outer}"
            )


def shell_volume(spec: ShellSpec) -> float:
    """Lebesgue volume of the shell: v_d * (outer^d - inner^d)."""
    vd = unit_ball_volume(spec.dim, spec.norm)
    return vd * (spec.outer**spec.dim - spec.inner**spec.dim)


def _sphere_directions(d: int, norm: NormKind, count: int, rng: np.random.Generator):
    """Points on the unit sphere of ``norm``, distributed per the cone measure.

    For both supported norms the cone measure coincides with the uniform
    surface measure: normalized Gaussians for l2; for the max norm, a
    uniformly chosen face of the cube with the remaining coordinates
    uniform on [-1, 1].
    """
    if norm is NormKind.EUCLIDEAN:
        g = rng.standard_normal((count, d))
        # a d-dim standard normal is never the zero vector in practice
        return g / np.linalg.norm(g, axis=1, keepdims=True)
    u = rng.uniform(-1.0, 1.0, size=(count, d))
    axis = rng.integers(0, d, size=count)
    sign = np.where(rng.random(count) < 0.5, -1.0, 1.0)
    u[np.arange(count), axis] = sign
    return u


def _sample_shell_batch(
    inner, outer, d: int, norm: NormKind, rng: np.random.Generator
):
    """Uniform draws from per-row shells; ``inner``/``outer`` are arrays."""
    inner = np.asarray(inner, dtype=np.float64)
    outer = np.asarray(outer, dtype=np.float64)
    count = inner.shape[0]
    u = rng.random(count)
    # invert the radial CDF (x^d - inner^d) / (outer^d - inner^d)
    radius = (inner**d + u * (outer**d - inner**d)) ** (1.0 / d)
    return radius[:, None] * _sphere_directions(d, norm, count, rng)


def sample_shell(spec: ShellSpec, rng: np.random.Generator) -> np.ndarray:
    """One point uniform on the shell, by radial CDF inversion (no rejection)."""
    return _sample_shell_batch(
        np.array([spec.inner]), np.array([spec.outer]), spec.dim, spec.norm, rng
    )[0]
