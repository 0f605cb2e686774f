"""Simulation studies around the estimator: CI coverage and bias scaling.

Replicates are driven by sub-streams spawned from one master seed, indexed
by replicate number, and aggregated in replicate order; results therefore
depend on the seed but never on worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import richardson
from .densities import Density
from .estimator import EntropyEstimate, estimate
from .geometry import NormKind
from .nn import SampleSet


def _replicate_rngs(seed: int, block: int, replicates: int) -> list[np.random.Generator]:
    """Independent streams keyed by (master seed, block, replicate index)."""
    return [
        np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(block, i)))
        for i in range(replicates)
    ]


def _run_indexed(fn, count: int, threads: int):
    """fn(i) for i in range(count), optionally on a thread pool, in order."""
    if threads <= 1:
        return [fn(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(count)))


def _one_estimate(
    model: Density,
    n_points: int,
    norm: NormKind,
    rng: np.random.Generator,
    chi_d: float,
    alpha: float,
    extrapolate: bool,
) -> EntropyEstimate:
    s = SampleSet(model.sample(n_points, rng), norm)
    if extrapolate and model.dim >= 4:
        plan = richardson.plan(model.dim, n_points - 1)
        return richardson.estimate_extrapolated(s, plan, rng, chi_d, alpha)
    return estimate(s, chi_d, alpha)


@dataclass(frozen=True)
class CoverageReport:
    """Per-replicate intervals and the empirical coverage of the truth."""

    reference: float
    alpha: float
    records: list[dict] = field(repr=False)
    coverage: float = 0.0
    coverage_se: float = 0.0


def coverage_study(
    model: Density,
    n_points: int,
    replicates: int,
    alpha: float,
    norm: NormKind,
    chi_d: float,
    seed: int,
    extrapolate: bool = False,
    threads: int = 1,
) -> CoverageReport:
    """Fraction of nominal (1-alpha) intervals containing the true entropy."""
    ref = model.reference_entropy()
    if ref.method == "mc":
        raise ValueError("coverage needs a closed-form or quadrature reference entropy")
    rngs = _replicate_rngs(seed, 0, replicates)

    def one(i: int) -> dict:
        est = _one_estimate(model, n_points, norm, rngs[i], chi_d, alpha, extrapolate)
        return {
            "replicate": i,
            "h": est.h,
            "v": est.v,
            "ci_low": est.ci_low,
            "ci_high": est.ci_high,
            "covered": bool(est.ci_low <= ref.value <= est.ci_high),
        }

    records = _run_indexed(one, replicates, threads)
    hits = sum(r["covered"] for r in records)
    rate = hits / replicates
    se = math.sqrt(rate * (1.0 - rate) / replicates)
    return CoverageReport(
        reference=ref.value,
        alpha=alpha,
        records=records,
        coverage=rate,
        coverage_se=se,
    )


@dataclass(frozen=True)
class BiasScanReport:
    """Mean bias against the analytic entropy at each N, plus a rate fit."""

    reference: float
    n_values: tuple[int, ...]
    mean_bias: tuple[float, ...]
    bias_se: tuple[float, ...]
    slope: float | None
    slope_se: float | None
    insufficient_power: bool
    fit_points: tuple[int, ...] = ()
    extrapolated_bias: tuple[float, ...] | None = None
    extrapolated_se: tuple[float, ...] | None = None


def _loglog_slope(n_values, bias, se) -> tuple[float, float]:
    """OLS slope of log|bias| on log N with a delta-method standard error."""
    x = np.log(np.asarray(n_values, dtype=np.float64))
    y = np.log(np.abs(np.asarray(bias)))
    xc = x - x.mean()
    slope = float(np.dot(xc, y) / np.dot(xc, xc))
    # each log|bias| carries variance (se/bias)^2
    w = np.asarray(se) / np.abs(np.asarray(bias))
    slope_se = float(np.sqrt(np.sum((xc * w) ** 2)) / np.dot(xc, xc))
    return slope, slope_se


def bias_scan(
    model: Density,
    n_values: list[int],
    replicates: int,
    norm: NormKind,
    chi_d: float,
    seed: int,
    compare_extrapolated: bool = False,
    threads: int = 1,
    min_powered_points: int = 3,
) -> BiasScanReport:
    """Mean bias of the plain estimator at each N and its log-log rate.

    The bias is measured against the analytic reference entropy.  If fewer
    than ``min_powered_points`` of the N values show |mean bias| above twice
    its standard error, the scan is flagged underpowered and no slope is
    reported.  With ``compare_extrapolated`` the extrapolated estimator runs
    on the same samples, giving a paired bias comparison.
    """
    if len(n_values) < 3 or list(n_values) != sorted(set(n_values)):
        raise ValueError("need a strictly increasing list of at least 3 sample sizes")
    ref = model.reference_entropy()
    if ref.method == "mc":
        raise ValueError("bias scan needs a closed-form or quadrature reference entropy")
    alpha = 0.05
    mean_bias, bias_se = [], []
    extr_bias, extr_se = [], []
    for n_points in n_values:
        rngs = _replicate_rngs(seed, n_points, replicates)

        def one(i: int, n_points=n_points) -> tuple[float, float | None]:
            rng = rngs[i]
            s = SampleSet(model.sample(n_points, rng), norm)
            h_plain = estimate(s, chi_d, alpha).h
            h_extr = None
            if compare_extrapolated and model.dim >= 4:
                plan = richardson.plan(model.dim, n_points - 1)
                h_extr = richardson.estimate_extrapolated(s, plan, rng, chi_d, alpha).h
            return h_plain, h_extr

        results = _run_indexed(one, replicates, threads)
        h_plain = np.array([r[0] for r in results])
        mean_bias.append(float(h_plain.mean() - ref.value))
        bias_se.append(float(h_plain.std(ddof=1) / math.sqrt(replicates)))
        if compare_extrapolated and model.dim >= 4:
            h_extr = np.array([r[1] for r in results])
            extr_bias.append(float(h_extr.mean() - ref.value))
            extr_se.append(float(h_extr.std(ddof=1) / math.sqrt(replicates)))

    powered = [
        n for n, b, s in zip(n_values, mean_bias, bias_se) if abs(b) > 2.0 * s
    ]
    if len(powered) < min_powered_points:
        slope, slope_se, weak = None, None, True
    else:
        # noise-dominated points would corrupt log|bias|; fit the rest
        sel = [i for i, n in enumerate(n_values) if n in powered]
        slope, slope_se = _loglog_slope(
            [n_values[i] for i in sel],
            [mean_bias[i] for i in sel],
            [bias_se[i] for i in sel],
        )
        weak = False
    return BiasScanReport(
        reference=ref.value,
        n_values=tuple(n_values),
        mean_bias=tuple(mean_bias),
        bias_se=tuple(bias_se),
        slope=slope,
        slope_se=slope_se,
        insufficient_power=weak,
        fit_points=tuple(powered),
        extrapolated_bias=tuple(extr_bias) if extr_bias else None,
        extrapolated_se=tuple(extr_se) if extr_se else None,
    )
