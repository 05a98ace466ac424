"""Command-line front end; every command writes CSV to stdout.

Exit status: 0 ok, 2 bad configuration, 3 quadrature failure, 4 ASE(p) not
unimodal, 5 Monte-Carlo validation failed.
"""

from __future__ import annotations

import argparse
import csv
import sys

import numpy as np

from . import analytic
from .analytic import NonUnimodalObjective, PcModel
from .params import load_config, validate
from .quadrature import QuadratureNonConvergence
from .simulate import default_window, estimate_pc_thresholds

EXIT_OK, EXIT_CONFIG, EXIT_QUADRATURE, EXIT_NON_UNIMODAL, EXIT_VALIDATION = 0, 2, 3, 4, 5

SWEEP_AXES = ("beta_db", "mu_l", "lambda_v", "p")
SWEEP_COLUMNS = (
    "axis_name", "axis_value", "model", "pc", "ase", "p_star",
    "pc_hat", "ci_low", "ci_high", "n_trials", "seed",
)
OPTP_COLUMNS = ("model", "p_star", "ase_star", "iterations")
VALIDATE_COLUMNS = (
    "mu_l", "lambda_v", "p", "d", "alpha", "beta", "p_t", "sigma2", "window", "n_trials", "seed",
    "pc", "pc_hat", "ci_low", "ci_high", "gap", "verdict",
)

# flag dest -> config key
_OVERRIDES = {"mu_l": "mu_l", "lambda_v": "lambda_v", "p": "p", "d": "d", "alpha": "alpha", "sigma2": "sigma2", "pt": "p_t"}


class _UsageError(Exception):
    pass


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, str)):
        return str(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".12g")


def _writer(out):
    return csv.writer(out, lineterminator="\n")


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def parse_sweep(text: str):
    parts = text.split(":")
    if len(parts) != 4:
        raise _UsageError(f"--sweep expects axis:start:stop:steps, got {text!r}")
    axis, start, stop, steps = parts
    if axis not in SWEEP_AXES:
        raise _UsageError(f"unknown sweep axis {axis!r}; choose from {', '.join(SWEEP_AXES)}")
    try:
        start, stop, steps = float(start), float(stop), int(steps)
    except ValueError:
        raise _UsageError(f"malformed --sweep {text!r}") from None
    if not start < stop:
        raise _UsageError("--sweep requires start < stop")
    if steps < 2:
        raise _UsageError("--sweep requires steps >= 2")
    return axis, start, stop, steps


def _params_from_args(args):
    raw = load_config(args.config) if args.config else {}
    for dest, key in _OVERRIDES.items():
        value = getattr(args, dest)
        if value is not None:
            raw[key] = value
    if args.beta_db is not None:
        raw["beta"] = db_to_linear(args.beta_db)
    return validate(raw)


def _models(args):
    return [PcModel(m) for m in (args.model or ["cox"])]


def _apply_axis(params, axis, value):
    if axis == "beta_db":
        return params.replace(beta=db_to_linear(value))
    return params.replace(**{axis: value})


def _analytic_row(params, model, with_p_star):
    result = analytic.ase(params, model)
    p_star = analytic.optimal_p(params, model).p_star if with_p_star else None
    return result.pc, result.ase, p_star


def _mc_columns(record):
    if record is None:
        return [None] * 5
    return [record.pc_hat, record.ci_low, record.ci_high, record.n_trials, record.seed]


def _evaluate(out, axis, values, base, models, with_p_star, mc_trials, seed, window, workers):
    points = [_apply_axis(base, axis, v) if axis else base for v in values]
    records = [None] * len(points)
    if mc_trials:
        if axis in (None, "beta_db"):
            # beta does not change the sampled SINRs: one simulation serves every row.
            win = window or default_window(base)
            records = estimate_pc_thresholds(base, [pt.beta for pt in points], win, mc_trials, seed, workers)
        else:
            records = [
                estimate_pc_thresholds(pt, [pt.beta], window or default_window(pt), mc_trials, seed, workers)[0]
                for pt in points
            ]
    w = _writer(out)
    w.writerow(SWEEP_COLUMNS)
    for value, point, record in zip(values, points, records):
        for model in models:
            pc, ase, p_star = _analytic_row(point, model, with_p_star)
            mc = _mc_columns(record if model is PcModel.COX else None)
            w.writerow([fmt(c) for c in [axis or "", value, model.value, pc, ase, p_star, *mc]])


def cmd_pc(args, out):
    params = _params_from_args(args)
    _evaluate(out, None, [None], params, _models(args), args.pstar, args.mc, args.seed, args.window, args.workers)
    return EXIT_OK


def cmd_sweep(args, out):
    if not args.sweep:
        raise _UsageError("sweep requires --sweep axis:start:stop:steps")
    axis, start, stop, steps = parse_sweep(args.sweep)
    params = _params_from_args(args)
    values = [float(v) for v in np.linspace(start, stop, steps)]
    _evaluate(out, axis, values, params, _models(args), args.pstar, args.mc, args.seed, args.window, args.workers)
    return EXIT_OK


def cmd_optp(args, out):
    params = _params_from_args(args)
    models = _models(args) if args.model else list(PcModel)
    w = _writer(out)
    w.writerow(OPTP_COLUMNS)
    for model in models:
        result = analytic.optimal_p(params, model)
        iterations = result.iterations if model is PcModel.COX else None
        w.writerow([fmt(c) for c in [model.value, result.p_star, result.ase_star, iterations]])
    return EXIT_OK


def cmd_validate(args, out):
    params = _params_from_args(args)
    n_trials = args.mc or 100_000
    window = args.window or default_window(params)
    pc = analytic.success_probability(params, PcModel.COX)
    record = estimate_pc_thresholds(params, [params.beta], window, n_trials, args.seed, args.workers)[0]
    passed = record.contains(pc)
    verdict = "PASS" if passed else "FAIL"
    w = _writer(out)
    w.writerow(VALIDATE_COLUMNS)
    row = [*params.as_dict().values(), window, n_trials, args.seed,
           pc, record.pc_hat, record.ci_low, record.ci_high, abs(record.pc_hat - pc), verdict]
    w.writerow([fmt(c) for c in row])
    print(
        f"{verdict}: analytic pc {fmt(pc)} {'inside' if passed else 'outside'} 99% CI "
        f"[{fmt(record.ci_low)}, {fmt(record.ci_high)}] from {n_trials} trials (seed {args.seed}, window {fmt(window)} km)",
        file=sys.stderr,
    )
    return EXIT_OK if passed else EXIT_VALIDATION


def _nonneg_int(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("config", nargs="?", help="key=value parameter file")
    group = common.add_argument_group("parameter overrides")
    group.add_argument("--beta-db", type=float, help="SINR threshold in dB")
    group.add_argument("--mu-l", type=float, help="line density, km^-1")
    group.add_argument("--lambda-v", type=float, help="node density per line, km^-1")
    group.add_argument("--p", type=float, help="ALOHA transmission probability")
    group.add_argument("--d", type=float, help="link distance, km")
    group.add_argument("--alpha", type=float, help="path-loss exponent")
    group.add_argument("--sigma2", type=float, help="noise power")
    group.add_argument("--pt", type=float, help="transmit power")
    common.add_argument("--model", action="append", choices=[m.value for m in PcModel],
                        help="success-probability model (repeatable; default cox)")
    common.add_argument("--mc", type=int, metavar="N_TRIALS", help="add Monte-Carlo estimates from N_TRIALS trials")
    common.add_argument("--seed", type=_nonneg_int, default=0, help="Monte-Carlo seed (default 0)")
    common.add_argument("--window", type=float, help="simulation window radius, km (default max(2, 200 d))")
    common.add_argument("--workers", type=int, default=1, help="simulation processes; results do not depend on it")
    common.add_argument("--pstar", action="store_true", help="also report the ASE-optimal p for each row")

    parser = argparse.ArgumentParser(prog="coxvanet", description="Link performance of a Cox-process VANET.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("pc", parents=[common], help="success probability and ASE at one point").set_defaults(func=cmd_pc)
    sweep = sub.add_parser("sweep", parents=[common], help="sweep one parameter")
    sweep.add_argument("--sweep", metavar="AXIS:START:STOP:STEPS", help=f"AXIS in {{{','.join(SWEEP_AXES)}}}")
    sweep.set_defaults(func=cmd_sweep)
    sub.add_parser("optp", parents=[common], help="ASE-optimal transmission probability").set_defaults(func=cmd_optp)
    sub.add_parser("validate", parents=[common], help="check the analytic pc against simulation").set_defaults(func=cmd_validate)
    return parser


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except (ValueError, OSError, _UsageError) as exc:
        # ConfigError and InvalidParameter are ValueErrors.
        print(f"coxvanet: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except QuadratureNonConvergence as exc:
        print(f"coxvanet: quadrature failure: {exc}", file=sys.stderr)
        return EXIT_QUADRATURE
    except NonUnimodalObjective as exc:
        print(f"coxvanet: {exc}", file=sys.stderr)
        return EXIT_NON_UNIMODAL


if __name__ == "__main__":
    sys.exit(main())
