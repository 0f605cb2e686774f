"""Command-line surface: gen, estimate, chi, coverage, bias-scan.

All stochastic commands take a seed (default 0) that is recorded in the
output; outputs are JSON without timestamps, so a fixed command line
reproduces byte-identical results.  Exit codes: 0 success, 2 input or
format error, 3 model violation (coincident points), 4 underpowered
bias scan.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import chi_constant, densities, experiments, richardson
from .estimator import estimate
from .geometry import NormKind
from .nn import DuplicatePointsError, SampleSet

SCHEMA = "1"

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_MODEL_VIOLATION = 3
EXIT_UNDERPOWERED = 4

_NORMS = {"l2": NormKind.EUCLIDEAN, "linf": NormKind.CHEBYSHEV}

LOG2 = math.log(2.0)


class InputError(ValueError):
    """Bad user input: malformed file, unknown model, missing chi value."""


def _emit(obj: dict, out_path: str | None):
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if out_path is None or out_path == "-":
        sys.stdout.write(text)
    else:
        with open(out_path, "w") as fh:
            fh.write(text)


def _load_model(spec_arg: str) -> densities.Density:
    """Model from an inline JSON object or a path to a JSON file."""
    text = spec_arg
    if not spec_arg.lstrip().startswith("{"):
        try:
            with open(spec_arg) as fh:
                text = fh.read()
        except OSError as exc:
            raise InputError(f"cannot read model file {spec_arg!r}: {exc}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"model is not valid JSON: {exc}") from exc
    try:
        return densities.from_spec(obj)
    except (ValueError, TypeError) as exc:
        raise InputError(str(exc)) from exc


def _write_csv(path: str | None, points: np.ndarray):
    dim = points.shape[1]
    lines = [",".join(f"x{i}" for i in range(dim))]
    lines.extend(",".join(repr(float(v)) for v in row) for row in points)
    text = "\n".join(lines) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _read_csv(path: str) -> np.ndarray:
    """CSV of one sample per row; a non-numeric first line is a header."""
    try:
        with open(path) as fh:
            first = fh.readline()
            rest = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path!r}: {exc}") from exc
    body = rest if _looks_like_header(first) else first + rest
    rows = [line for line in body.splitlines() if line.strip()]
    if not rows:
        raise InputError(f"{path!r} contains no data rows")
    try:
        data = np.array([[float(tok) for tok in line.split(",")] for line in rows])
    except ValueError as exc:
        raise InputError(f"{path!r} is not numeric CSV: {exc}") from exc
    if data.ndim != 2:
        raise InputError(f"{path!r} rows have inconsistent lengths")
    return data


def _looks_like_header(line: str) -> bool:
    try:
        [float(tok) for tok in line.split(",")]
        return False
    except ValueError:
        return True


def _resolve_chi(args, d: int, norm: NormKind) -> tuple[float, dict]:
    """chi_d per the precedence: explicit --chi, bundled table, --chi-draws."""
    if args.chi is not None:
        return args.chi, {"kind": "explicit", "value": args.chi}
    try:
        value = chi_constant.chi_from_table(d, norm)
        return value, {"kind": "table", "value": value}
    except KeyError:
        pass
    if args.chi_draws:
        est = chi_constant.chi(d, norm, args.chi_draws, args.seed)
        return est.value, {
            "kind": "mc",
            "value": est.value,
            "stderr": est.stderr,
            "draws": est.draws,
            "seed": est.seed,
        }
    raise InputError(
        f"no bundled chi value for d={d}, norm={norm.value}; "
        "pass --chi VALUE or --chi-draws N"
    )


def _norm(args) -> NormKind:
    return _NORMS[args.norm]


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("KLE_THREADS", "")
    if env.strip():
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise InputError(f"KLE_THREADS must be an integer, got {env!r}") from exc
    return 1


def cmd_gen(args) -> int:
    model = _load_model(args.model)
    if args.count < 0:
        raise InputError("count must be nonnegative")
    rng = np.random.default_rng(args.seed)
    points = (
        model.sample(args.count, rng)
        if args.count
        else np.empty((0, model.dim))
    )
    _write_csv(args.out, points)
    return EXIT_OK


def cmd_estimate(args) -> int:
    points = _read_csv(args.input)
    norm = _norm(args)
    s = SampleSet(points, norm)
    chi_d, chi_source = _resolve_chi(args, s.dim, norm)
    extrapolated = bool(args.extrapolate and s.dim >= 4)
    plan_info = None
    if extrapolated:
        plan = richardson.plan(s.dim, s.n_points - 1)
        rng = np.random.default_rng(args.seed)
        est = richardson.estimate_extrapolated(s, plan, rng, chi_d, args.alpha)
        plan_info = {
            "ell": plan.ell,
            "alphas": list(plan.alphas),
            "subsample_sizes": list(plan.subsample_sizes),
            "a_d": plan.a_d,
        }
    else:
        est = estimate(s, chi_d, args.alpha)

    scale = 1.0 / LOG2 if args.bits else 1.0
    report = {
        "schema": SCHEMA,
        "h": est.h * scale,
        "v": est.v * scale * scale,
        "ci_low": est.ci_low * scale,
        "ci_high": est.ci_high * scale,
        "units": "bits" if args.bits else "nats",
        "n": est.n,
        "d": est.d,
        "norm": args.norm,
        "alpha": est.alpha,
        "inflation": est.inflation,
        "chi_d_used": est.chi_d_used,
        "chi_source": chi_source,
        "v_clamped": est.v_clamped,
        "extrapolated": extrapolated,
        "seed": args.seed,
    }
    if plan_info is not None:
        report["plan"] = plan_info
    _emit(report, args.out)
    return EXIT_OK


def cmd_chi(args) -> int:
    norm = _norm(args)
    est = chi_constant.chi(
        args.d,
        norm,
        args.draws,
        args.seed,
        proposal_shape=args.proposal_shape,
        inner=args.inner_draws,
        method=args.t_method,
    )
    _emit(
        {
            "schema": SCHEMA,
            "d": est.d,
            "norm": args.norm,
            "value": est.value,
            "stderr": est.stderr,
            "draws": est.draws,
            "seed": est.seed,
        },
        args.out,
    )
    return EXIT_OK


def cmd_coverage(args) -> int:
    model = _load_model(args.model)
    norm = _norm(args)
    chi_d, chi_source = _resolve_chi(args, model.dim, norm)
    try:
        report = experiments.coverage_study(
            model,
            args.n,
            args.replicates,
            args.alpha,
            norm,
            chi_d,
            args.seed,
            extrapolate=args.extrapolate,
            threads=_threads(args),
        )
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    _emit(
        {
            "schema": SCHEMA,
            "model": model.spec,
            "n": args.n,
            "replicates": args.replicates,
            "alpha": args.alpha,
            "norm": args.norm,
            "extrapolate": args.extrapolate,
            "seed": args.seed,
            "chi_d_used": chi_d,
            "chi_source": chi_source,
            "reference": report.reference,
            "coverage": report.coverage,
            "coverage_se": report.coverage_se,
            "records": report.records,
        },
        args.out,
    )
    return EXIT_OK


def cmd_bias_scan(args) -> int:
    model = _load_model(args.model)
    norm = _norm(args)
    try:
        n_values = [int(tok) for tok in args.n_list.split(",")]
    except ValueError as exc:
        raise InputError(f"--n-list must be comma-separated integers: {exc}") from exc
    chi_d, chi_source = _resolve_chi(args, model.dim, norm)
    try:
        report = experiments.bias_scan(
            model,
            n_values,
            args.replicates,
            norm,
            chi_d,
            args.seed,
            compare_extrapolated=args.compare_extrapolated,
            threads=_threads(args),
        )
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    payload = {
        "schema": SCHEMA,
        "model": model.spec,
        "n_values": list(report.n_values),
        "replicates": args.replicates,
        "norm": args.norm,
        "seed": args.seed,
        "chi_d_used": chi_d,
        "chi_source": chi_source,
        "reference": report.reference,
        "records": [
            {"n": n, "mean_bias": b, "bias_se": s}
            for n, b, s in zip(report.n_values, report.mean_bias, report.bias_se)
        ],
        "slope": report.slope,
        "slope_se": report.slope_se,
        "insufficient_power": report.insufficient_power,
        "fit_points": list(report.fit_points),
    }
    if report.extrapolated_bias is not None:
        payload["extrapolated_records"] = [
            {"n": n, "mean_bias": b, "bias_se": s}
            for n, b, s in zip(
                report.n_values, report.extrapolated_bias, report.extrapolated_se
            )
        ]
    _emit(payload, args.out)
    return EXIT_UNDERPOWERED if report.insufficient_power else EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kle",
        description="Nearest-neighbor differential entropy estimation toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, norm=True):
        p.add_argument("--seed", type=int, default=0, help="RNG seed (recorded in output)")
        p.add_argument("--out", default=None, help="output path (default stdout)")
        if norm:
            p.add_argument("--norm", choices=sorted(_NORMS), default="l2")

    def chi_source_flags(p):
        p.add_argument("--chi", type=float, default=None,
                       help="explicit chi_d value (overrides the bundled table)")
        p.add_argument("--chi-draws", type=int, default=0,
                       help="Monte-Carlo draws for chi_d when the table has no entry")

    p = sub.add_parser("gen", help="sample a model to CSV")
    p.add_argument("--model", required=True, help="model JSON (inline or a file path)")
    p.add_argument("--count", type=int, required=True)
    common(p, norm=False)
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("estimate", help="entropy estimate with confidence interval")
    p.add_argument("--in", dest="input", required=True, help="input CSV path")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--extrapolate", action="store_true",
                   help="bias-cancelling extrapolation when d >= 4")
    p.add_argument("--bits", action="store_true", help="report in bits instead of nats")
    chi_source_flags(p)
    common(p)
    p.set_defaults(fn=cmd_estimate)

    p = sub.add_parser("chi", help="Monte-Carlo estimate of the constant chi_d")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--draws", type=int, required=True)
    p.add_argument("--proposal-shape", type=float, default=None,
                   help="Gamma shape of the (u,v) proposal (default 1/d)")
    p.add_argument("--inner-draws", type=int, default=1,
                   help="overlap draws averaged per (u,v) pair")
    p.add_argument("--t-method", choices=["pair", "shell"], default="pair",
                   help="estimator for the shell integral T(u,v)")
    common(p)
    p.set_defaults(fn=cmd_chi)

    p = sub.add_parser("coverage", help="empirical confidence-interval coverage")
    p.add_argument("--model", required=True)
    p.add_argument("--n", type=int, required=True, help="points per replicate")
    p.add_argument("--replicates", type=int, required=True)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--extrapolate", action="store_true")
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: KLE_THREADS or 1)")
    chi_source_flags(p)
    common(p)
    p.set_defaults(fn=cmd_coverage)

    p = sub.add_parser("bias-scan", help="mean bias against the analytic entropy per N")
    p.add_argument("--model", required=True)
    p.add_argument("--n-list", required=True, help="comma-separated sample sizes")
    p.add_argument("--replicates", type=int, required=True)
    p.add_argument("--compare-extrapolated", action="store_true",
                   help="also run the extrapolated estimator on the same samples")
    p.add_argument("--threads", type=int, default=None)
    chi_source_flags(p)
    common(p)
    p.set_defaults(fn=cmd_bias_scan)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DuplicatePointsError as exc:
        print(f"model violation: {exc}", file=sys.stderr)
        return EXIT_MODEL_VIOLATION
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
