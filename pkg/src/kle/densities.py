"""Reference densities: exact samplers, log-densities, and known entropies.

Every family pairs an exact sampler with an absolute log-density (normalizing
constant included), so that estimator runs can be scored against analytic or
quadrature ground truth.  Families whose normalizer has no closed form
(gen_exp, sine_singular) compute it once by adaptive quadrature and cache it.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq
from scipy.special import betaln, digamma, gammaln, polygamma

from .geometry import NormKind, unit_ball_volume

_QUAD_TOL = 1e-10


def _trigamma(x):
    return polygamma(1, x)


def _sphere_area(d: int) -> float:
    """Surface area of the Euclidean unit sphere in R^d."""
    return d * unit_ball_volume(d, NormKind.EUCLIDEAN)


def _uniform_directions(d: int, count: int, rng: np.random.Generator):
    if d == 1:
        return np.where(rng.random((count, 1)) < 0.5, -1.0, 1.0)
    g = rng.standard_normal((count, d))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


@dataclass(frozen=True)
class ReferenceEntropy:
    """Ground-truth entropy with how it was obtained."""

    value: float
    method: str  # closed_form | quadrature | mc
    tolerance: float = 0.0


class Density:
    """Base interface: sample, absolute log-density, reference entropy."""

    dim: int
    family: str

    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError

    def log_density(self, x: np.ndarray) -> np.ndarray:
        """log f at points of shape (..., dim); -inf outside the support."""
        raise NotImplementedError

    def reference_entropy(self) -> ReferenceEntropy:
        raise NotImplementedError

    def log_density_variance(self) -> float | None:
        """Var(log f(X)) when known exactly, else None."""
        return None

    def grad_log_density(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError(f"{self.family} has no gradient implementation")

    @property
    def spec(self) -> dict:
        raise NotImplementedError

    def __repr__(self):
        params = {k: v for k, v in self.spec.items() if k not in ("family", "dim")}
        return f"{type(self).__name__}(dim={self.dim}, {params})"


class Gaussian(Density):
    """Isotropic normal with scale sigma."""

    family = "gaussian"

    def __init__(self, dim: int, sigma: float = 1.0):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        if sigma <= 0:
            raise ValueError("sigma must be positive")
        self.dim = dim
        self.sigma = float(sigma)

    def sample(self, count, rng):
        return self.sigma * rng.standard_normal((count, self.dim))

    def log_density(self, x):
        x = np.asarray(x, dtype=np.float64)
        sq = np.sum(x * x, axis=-1)
        return -0.5 * self.dim * math.log(2 * math.pi * self.sigma**2) - sq / (
            2 * self.sigma**2
        )

    def reference_entropy(self):
        return ReferenceEntropy(
            0.5 * self.dim * math.log(2 * math.pi * math.e * self.sigma**2),
            "closed_form",
        )

    def log_density_variance(self):
        # log f is a chi^2_d variable scaled by 1/2
        return 0.5 * self.dim

    def grad_log_density(self, x):
        return -np.asarray(x, dtype=np.float64) / self.sigma**2

    @property
    def spec(self):
        return {"family": self.family, "dim": self.dim, "params": {"sigma": self.sigma}}


class Uniform(Density):
    """Uniform on the unit cube [0,1]^d."""

    family = "uniform"

    def __init__(self, dim: int):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        self.dim = dim

    def sample(self, count, rng):
        return rng.random((count, self.dim))

    def log_density(self, x):
        x = np.asarray(x, dtype=np.float64)
        inside = np.all((x >= 0.0) & (x <= 1.0), axis=-1)
        return np.where(inside, 0.0, -np.inf)

    def reference_entropy(self):
        return ReferenceEntropy(0.0, "closed_form")

    def log_density_variance(self):
        return 0.0

    @property
    def spec(self):
        return {"family": self.family, "dim": self.dim, "params": {}}


class Exponential(Density):
    """Product of exponentials with a common rate."""

    family = "exponential"

    def __init__(self, dim: int = 1, rate: float = 1.0):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        if rate <= 0:
            raise ValueError("rate must be positive")
        self.dim = dim
        self.rate = float(rate)

    def sample(self, count, rng):
        return rng.exponential(1.0 / self.rate, size=(count, self.dim))

    def log_density(self, x):
        x = np.asarray(x, dtype=np.float64)
        inside = np.all(x >= 0.0, axis=-1)
        val = self.dim * math.log(self.rate) - self.rate * np.sum(x, axis=-1)
        return np.where(inside, val, -np.inf)

    def reference_entropy(self):
        return ReferenceEntropy(self.dim * (1.0 - math.log(self.rate)), "closed_form")

    def log_density_variance(self):
        return float(self.dim)

    @property
    def spec(self):
        return {"family": self.family, "dim": self.dim, "params": {"rate": self.rate}}


class HeavyTail(Density):
    """Polynomial tails: f(x) = c * (1+|x|^2)^(-(d+a)/2), a > d.

    The squared radius maps to a Beta variable (R^2/(1+R^2) ~ Beta(d/2, a/2)),
    which gives an exact sampler and closed forms for the normalizer, the
    entropy, and Var(log f).
    """

    family = "heavy_tail"

    def __init__(self, dim: int, a: float, *, _check_moments: bool = True):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        if a <= 0:
            raise ValueError(f"tail index must be positive, got a={a}")
        if _check_moments and a <= dim:
            # a > d gives the d+eps moments the estimator theory needs
            raise ValueError(f"need tail index a > dim, got a={a}, dim={dim}")
        self.dim = dim
        self.a = float(a)
        self.log_c = (
            gammaln(0.5 * (dim + a)) - 0.5 * dim * math.log(math.pi) - gammaln(0.5 * a)
        )

    def sample(self, count, rng):
        u = rng.beta(0.5 * self.dim, 0.5 * self.a, size=count)
        radius = np.sqrt(u / (1.0 - u))
        return radius[:, None] * _uniform_directions(self.dim, count, rng)

    def log_density(self, x):
        x = np.asarray(x, dtype=np.float64)
        return self.log_c - 0.5 * (self.dim + self.a) * np.log1p(np.sum(x * x, axis=-1))

    def reference_entropy(self):
        half = 0.5 * (self.dim + self.a)
        value = -self.log_c + half * (digamma(half) - digamma(0.5 * self.a))
        return ReferenceEntropy(float(value), "closed_form")

    def log_density_variance(self):
        half = 0.5 * (self.dim + self.a)
        # log f = log c + 2*half*log(1-U)/2 with U ~ Beta(d/2, a/2)
        return float(half**2 * (_trigamma(0.5 * self.a) - _trigamma(half)))

    def grad_log_density(self, x):
        x = np.asarray(x, dtype=np.float64)
        sq = np.sum(x * x, axis=-1, keepdims=True)
        return -(self.dim + self.a) * x / (1.0 + sq)

    @property
    def spec(self):
        return {"family": self.family, "dim": self.dim, "params": {"a": self.a}}


class GenExp(Density):
    """Stretched-exponential tails: f(x) = c * exp(-(1+|x|^2)^(a/2)).

    No closed-form normalizer; radial integrals are cached quadratures.
    Sampling rejects from an exact envelope: for a < 2 the generalized
    Gamma envelope exp(-r^a) dominates, for a >= 2 a Gaussian envelope
    from the tangent of t -> (1+t)^(a/2) at the radial mode does.
    """

    family = "gen_exp"

    def __init__(self, dim: int, a: float, _exponent_scale: float = 1.0):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        if a <= 0:
            raise ValueError("shape a must be positive")
        self.dim = dim
        self.a = float(a)
        self._scale = float(_exponent_scale)  # internal: scales the exponent

    def _phi(self, rsq):
        """Exponent s*(1+r^2)^(a/2) as a function of r^2."""
        return self._scale * (1.0 + rsq) ** (0.5 * self.a)

    @cached_property
    def _radial_norm(self) -> float:
        """Integral of r^(d-1) exp(-phi(r^2)) dr over (0, inf)."""
        val, err = quad(
            lambda r: r ** (self.dim - 1) * math.exp(-self._phi(r * r)),
            0.0,
            np.inf,
            epsabs=_QUAD_TOL,
            epsrel=_QUAD_TOL,
            limit=200,
        )
        return val

    @cached_property
    def log_c(self) -> float:
        return -math.log(_sphere_area(self.dim) * self._radial_norm)

    @cached_property
    def _envelope(self):
        """(kind, gamma shape, rate-like parameter, log offset).

        The envelope exponent minorizes phi: s*r^a for a < 2 (phi is concave
        in r^2 there and r^a is its tail), or the tangent line of
        u -> s(1+u)^(a/2) at the radial mode for a >= 2 (convexity).
        """
        d, a, s = self.dim, self.a, self._scale
        if a < 2.0:
            return ("power", d / a, s, 0.0)

        def slope_eq(u):
            return (d - 1.0) - a * s * u * (1.0 + u) ** (0.5 * a - 1.0)

        if d == 1:
            u0 = 0.0
        else:
            hi = 1.0
            while slope_eq(hi) > 0.0:
                hi *= 2.0
            u0 = brentq(slope_eq, 0.0, hi)
        slope = 0.5 * a * s * (1.0 + u0) ** (0.5 * a - 1.0)
        intercept = self._phi(u0) - slope * u0
        return ("gauss", 0.5 * d, slope, intercept)

    def _sample_radius(self, count, rng):
        kind, shape, rate, offset = self._envelope
        out = np.empty(count)
        need = np.arange(count)
        while need.size:
            g = rng.gamma(shape, size=need.size)
            if kind == "power":
                r = (g / rate) ** (1.0 / self.a)
                log_env = -rate * r**self.a
            else:
                r = np.sqrt(g / rate)
                log_env = -(offset + rate * r * r)
            # accept with prob exp(-phi - log_env) <= 1 by the envelope bound
            keep = np.log(rng.random(need.size)) < -self._phi(r * r) - log_env
            out[need[keep]] = r[keep]
            need = need[~keep]
        return out

    def sample(self, count, rng):
        radius = self._sample_radius(count, rng)
        return radius[:, None] * _uniform_directions(self.dim, count, rng)

    def log_density(self, x):
        x = np.asarray(x, dtype=np.float64)
        return self.log_c - self._phi(np.sum(x * x, axis=-1))

    @cached_property
    def _entropy(self) -> ReferenceEntropy:
        num, _ = quad(
            lambda r: r ** (self.dim - 1)
            * self._phi(r * r)
            * math.exp(-self._phi(r * r)),
            0.0,
            np.inf,
            epsabs=_QUAD_TOL,
            epsrel=_QUAD_TOL,
            limit=200,
        )
        return ReferenceEntropy(
            -self.log_c + num / self._radial_norm, "quadrature", 1e-8
        )

    def reference_entropy(self):
        return self._entropy

    def log_density_variance(self):
        # log f = log_c - phi, so Var(log f) = Var(phi) = E[phi^2] - E[phi]^2
        # and E[phi] = entropy + log_c
        num2, _ = quad(
            lambda r: r ** (self.dim - 1)
            * self._phi(r * r) ** 2
            * math.exp(-self._phi(r * r)),
            0.0,
            np.inf,
            epsabs=_QUAD_TOL,
            epsrel=_QUAD_TOL,
            limit=200,
        )
        e_phi = self.reference_entropy().value + self.log_c
        return float(num2 / self._radial_norm - e_phi * e_phi)

    def grad_log_density(self, x):
        x = np.asarray(x, dtype=np.float64)
        sq = np.sum(x * x, axis=-1, keepdims=True)
        return -self._scale * self.a * x * (1.0 + sq) ** (0.5 * self.a - 1.0)

    @property
    def spec(self):
        return {"family": self.family, "dim": self.dim, "params": {"a": self.a}}


class GammaRadial(Density):
    """Radial Gamma law: f(x) = c |x|^a exp(-|x|); one-sided on (0,inf) if d=1.

    The radius is Gamma(a+d) (Gamma(a+1) for the one-sided d=1 case), which
    yields closed forms throughout.
    """

    family = "gamma_radial"

    # ranges where the full CLT is available; outside them the estimator
    # still runs but only the slower-rate guarantee holds
    def __init__(self, dim: int, a: float):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        if a <= 0:
            raise ValueError("power a must be positive")
        self.dim = dim
        self.a = float(a)
        if not self._in_clt_range():
            warnings.warn(
                f"gamma_radial(d={dim}, a={a}) is outside the range with a "
                "central limit theorem; estimates still run but the stated "
                "confidence level is not guaranteed",
                stacklevel=2,
            )

    def _in_clt_range(self) -> bool:
        d, a = self.dim, self.a
        if d == 1:
            return a >= 1.0
        if d == 2:
            return a >= 2.0
        if d == 3:
            return 2.0 <= a < 12.0
        if 4 <= d <= 9:
            return d / 2.0 < a < 4.0 * d / (d - 2.0)
        return False

    @property
    def _shape(self) -> float:
        return self.a + (1.0 if self.dim == 1 else self.dim)

    def sample(self, count, rng):
        radius = rng.gamma(self._shape, size=count)
        if self.dim == 1:
            return radius[:, None]
        return radius[:, None] * _uniform_directions(self.dim, count, rng)

    def log_density(self, x):
        x = np.asarray(x, dtype=np.float64)
        if self.dim == 1:
            r = x[..., 0]
            with np.errstate(divide="ignore", invalid="ignore"):
                val = -gammaln(self.a + 1.0) + self.a * np.log(r) - r
            return np.where(r > 0.0, val, -np.inf)
        r = np.sqrt(np.sum(x * x, axis=-1))
        log_c = -math.log(_sphere_area(self.dim)) - gammaln(self._shape)
        with np.errstate(divide="ignore", invalid="ignore"):
            val = log_c + self.a * np.log(r) - r
        return np.where(r > 0.0, val, -np.inf)

    def reference_entropy(self):
        k = self._shape
        if self.dim == 1:
            value = gammaln(self.a + 1.0) - self.a * digamma(k) + k
        else:
            value = (
                math.log(_sphere_area(self.dim))
                + gammaln(k)
                - self.a * digamma(k)
                + k
            )
        return ReferenceEntropy(float(value), "closed_form")

    def log_density_variance(self):
        # Var(a log R - R) with R ~ Gamma(k): Cov(log R, R) = 1
        k = self._shape
        return float(self.a**2 * _trigamma(k) + k - 2.0 * self.a)

    @property
    def spec(self):
        return {"family": self.family, "dim": self.dim, "params": {"a": self.a}}


class BetaProduct(Density):
    """Product density prop. to prod_i x_i^a_i (1-x_i)^b_i on the unit cube."""

    family = "beta_product"

    def __init__(self, a, b):
        a = np.atleast_1d(np.asarray(a, dtype=np.float64))
        b = np.atleast_1d(np.asarray(b, dtype=np.float64))
        if a.shape != b.shape or a.ndim != 1:
            raise ValueError("a and b must be equal-length vectors")
        if np.any(a <= 0.0) or np.any(b <= 0.0):
            raise ValueError("exponents must be positive")
        self.a = a
        self.b = b
        self.dim = a.size
        tau, mu = float(np.min(np.r_[a, b])), float(np.max(np.r_[a, b]))
        ok = (
            (self.dim == 1 and tau >= 1.0)
            or (self.dim == 2 and tau >= 2.0)
            or (self.dim >= 3 and tau >= 2.0 and mu < 4.0)
        )
        if not ok:
            warnings.warn(
                f"beta_product exponents (min {tau}, max {mu}) in dim {self.dim} "
                "are outside the range with a central limit theorem",
                stacklevel=2,
            )

    def sample(self, count, rng):
        return rng.beta(self.a + 1.0, self.b + 1.0, size=(count, self.dim))

    def log_density(self, x):
        x = np.asarray(x, dtype=np.float64)
        inside = np.all((x > 0.0) & (x < 1.0), axis=-1)
        safe = np.where(inside[..., None], x, 0.5)
        val = np.sum(
            self.a * np.log(safe)
            + self.b * np.log1p(-safe)
            - betaln(self.a + 1.0, self.b + 1.0),
            axis=-1,
        )
        return np.where(inside, val, -np.inf)

    def reference_entropy(self):
        alpha, beta = self.a + 1.0, self.b + 1.0
        s = alpha + beta
        value = np.sum(
            betaln(alpha, beta)
            - (alpha - 1.0) * digamma(alpha)
            - (beta - 1.0) * digamma(beta)
            + (s - 2.0) * digamma(s)
        )
        return ReferenceEntropy(float(value), "closed_form")

    def log_density_variance(self):
        alpha, beta = self.a + 1.0, self.b + 1.0
        s = alpha + beta
        per_coord = (
            self.a**2 * (_trigamma(alpha) - _trigamma(s))
            + self.b**2 * (_trigamma(beta) - _trigamma(s))
            - 2.0 * self.a * self.b * _trigamma(s)
        )
        return float(np.sum(per_coord))

    @property
    def spec(self):
        return {
            "family": self.family,
            "dim": self.dim,
            "params": {"a": self.a.tolist(), "b": self.b.tolist()},
        }


class SineSingular(Density):
    """f(x) = c_p x^p |sin(pi/x)| on (0,1): infinitely many interior zeros.

    The normalizer and entropy integrals are summed over the lobes
    [1/(k+1), 1/k], the tail below 1/K being bounded by x^p.  Sampling is
    rejection under the envelope c_p x^p with acceptance |sin(pi/x)|.
    """

    family = "sine_singular"
    dim = 1

    def __init__(self, p: float = 2.0):
        if p < 2.0:
            raise ValueError(f"need p >= 2, got p={p}")
        self.p = float(p)

    def _lobes(self, tail_tol: float = 1e-12):
        """Lobe edges 1/k covering all but tail_tol of the x^p envelope mass."""
        n = max(8, int(math.ceil((1.0 / (tail_tol * (self.p + 1.0))) ** (1.0 / (self.p + 1.0)))))
        return [(1.0 / (k + 1.0), 1.0 / k) for k in range(1, n + 1)]

    def _lobe_sum(self, integrand) -> float:
        total = 0.0
        for lo, hi in self._lobes():
            val, _ = quad(integrand, lo, hi, epsabs=1e-13, epsrel=1e-11, limit=100)
            total += val
        return total

    @cached_property
    def log_c(self) -> float:
        mass = self._lobe_sum(lambda x: x**self.p * abs(math.sin(math.pi / x)))
        return -math.log(mass)

    def sample(self, count, rng):
        out = np.empty(count)
        filled = 0
        while filled < count:
            m = max(count - filled, 128)
            x = rng.random(m) ** (1.0 / (self.p + 1.0))
            keep = rng.random(m) < np.abs(np.sin(np.pi / x))
            got = x[keep][: count - filled]
            out[filled : filled + got.size] = got
            filled += got.size
        return out[:, None]

    def log_density(self, x):
        x = np.asarray(x, dtype=np.float64)
        r = x[..., 0]
        inside = (r > 0.0) & (r < 1.0)
        safe = np.where(inside, r, 0.5)
        with np.errstate(divide="ignore"):
            val = (
                self.log_c
                + self.p * np.log(safe)
                + np.log(np.abs(np.sin(np.pi / safe)))
            )
        return np.where(inside, val, -np.inf)

    @cached_property
    def _entropy(self) -> ReferenceEntropy:
        c = math.exp(self.log_c)

        def integrand(x):
            s = abs(math.sin(math.pi / x))
            if s == 0.0:
                return 0.0
            logf = self.log_c + self.p * math.log(x) + math.log(s)
            return c * x**self.p * s * logf

        return ReferenceEntropy(-self._lobe_sum(integrand), "quadrature", 1e-6)

    def reference_entropy(self):
        return self._entropy

    @property
    def spec(self):
        return {"family": self.family, "dim": 1, "params": {"p": self.p}}


_FAMILIES = {
    cls.family: cls
    for cls in (Gaussian, Uniform, Exponential, HeavyTail, GenExp, GammaRadial,
                BetaProduct, SineSingular)
}


def from_spec(obj: dict) -> Density:
    """Build a density from its JSON description {family, dim, params}."""
    try:
        family = obj["family"]
    except (TypeError, KeyError):
        raise ValueError("model must be an object with a 'family' field") from None
    if family not in _FAMILIES:
        raise ValueError(f"unknown family {family!r}; known: {sorted(_FAMILIES)}")
    params = dict(obj.get("params", {}))
    dim = obj.get("dim")
    if family == "beta_product":
        model = BetaProduct(**params)
        if dim is not None and model.dim != dim:
            raise ValueError(f"dim {dim} inconsistent with exponent vectors")
        return model
    if family == "sine_singular":
        if dim not in (None, 1):
            raise ValueError("sine_singular is one-dimensional")
        return SineSingular(**params)
    if dim is None:
        raise ValueError(f"family {family!r} needs an explicit dim")
    return _FAMILIES[family](dim, **params)


def reference_sigma2(
    model: Density,
    chi_d: float,
    mc_draws: int = 0,
    rng: np.random.Generator | None = None,
) -> tuple[float, float]:
    """Asymptotic variance Var(log f(X)) + chi_d, with its standard error.

    Uses the family's exact value when available (stderr 0); otherwise a
    Monte-Carlo moment estimate with ``mc_draws`` samples.
    """
    exact = model.log_density_variance()
    if exact is not None:
        return exact + chi_d, 0.0
    if mc_draws < 2 or rng is None:
        raise ValueError(
            f"{model.family} has no closed-form Var(log f); pass mc_draws and rng"
        )
    logf = model.log_density(model.sample(mc_draws, rng))
    centered = logf - logf.mean()
    var = float(np.mean(centered**2))
    # standard error of a sample variance via its fourth moment
    m4 = float(np.mean(centered**4))
    se = math.sqrt(max(m4 - var**2, 0.0) / mc_draws)
    return var + chi_d, se


def second_moment_unit_coordinate(d: int, norm: NormKind) -> float:
    """Mean of y_1^2 over the unit ball of the norm, times its volume...

    Precisely: integral of y_1^2 over B(0,1), divided by v_d.  Equals
    1/(d+2) for l2 and 1/3 for the max norm.
    """
    if norm is NormKind.CHEBYSHEV:
        return 1.0 / 3.0
    return 1.0 / (d + 2.0)


def leading_bias_constant(d: int, norm: NormKind) -> float:
    """The constant multiplying integral(f^(-2/d-1) |grad f|^2) in the
    leading N^(-2/d) bias term of the plain estimator.

    Assembled from the second-order Taylor term of the small-ball mass:
    the quadratic coefficient is (1/2) * integral(y_1^2 over B(0,1)) *
    Laplacian, and averaging exp(-v_d f r) r^(2/d) dr brings in
    Gamma(1+2/d) / (v_d f)^(1+2/d).  Integrating by parts converts the
    Laplacian form into the gradient form (a factor 2/d).  The sign is
    negative: the expected estimate undershoots at leading order.
    """
    kappa2 = second_moment_unit_coordinate(d, norm)
    vd = unit_ball_volume(d, norm)
    return -(kappa2 / d) * math.gamma(1.0 + 2.0 / d) * vd ** (-2.0 / d)


def _bias_proposal(model: Density) -> Density:
    """A proposal matched to the tilted density f^(1-2/d) for the bias MC."""
    d = model.dim
    if isinstance(model, Gaussian):
        return Gaussian(d, model.sigma * math.sqrt(d / (d - 2.0)))
    if isinstance(model, HeavyTail):
        # a proposal only needs normalizability (index > 0), not moments
        return HeavyTail(d, model.a * (d - 2.0) / d, _check_moments=False)
    if isinstance(model, GenExp):
        return GenExp(d, model.a, _exponent_scale=1.0 - 2.0 / d)
    raise ValueError(
        f"leading-bias diagnostic supports gaussian, gen_exp, heavy_tail; "
        f"got {model.family}"
    )


def leading_bias_coefficient(
    model: Density,
    norm: NormKind,
    mc_draws: int,
    rng: np.random.Generator,
) -> tuple[float, float]:
    """Monte-Carlo estimate of the leading bias coefficient, with stderr.

    The integral of f^(-2/d-1)|grad f|^2 is averaged under a proposal
    whose tails match the tilt f^(1-2/d), keeping the weights square
    integrable (plain sampling from f has infinite variance here).
    Requires d >= 3 and a family with a gradient.
    """
    if model.dim < 3:
        raise ValueError("the N^(-2/d) expansion needs d >= 3")
    if mc_draws < 2:
        raise ValueError("need at least 2 draws")
    proposal = _bias_proposal(model)
    x = proposal.sample(mc_draws, rng)
    grad = model.grad_log_density(x)
    log_w = (1.0 - 2.0 / model.dim) * model.log_density(x) - proposal.log_density(x)
    vals = np.exp(log_w) * np.sum(grad * grad, axis=-1)
    scale = leading_bias_constant(model.dim, norm)
    mean = float(np.mean(vals))
    se = float(np.std(vals, ddof=1) / math.sqrt(mc_draws))
    return scale * mean, abs(scale) * se
