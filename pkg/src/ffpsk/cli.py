"""Command-line entry point: ``ffpsk {matrix,sweep,simulate}``.

Exit codes: 0 success, 2 usage or validation error, 1 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import appendix
from .baselines import NumericalError, QuadratureError
from .info import ConvergenceError
from .receiver import DomainError, ReceiverConfig, build_decision_tree, exact_channel_matrix
from .simulate import SimulationSpec, estimate_channel_matrix
from .sweep import GRIDS, OBJECTIVES, SCHEMES, SweepConfig, rows_to_csv, rows_to_json, run_sweep

NUMERICAL_ERRORS = (ConvergenceError, QuadratureError, NumericalError, FloatingPointError)


def _common_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--m", type=int, choices=(3, 4), help="symbol count (default 4)")
    p.add_argument("--alpha-sq", type=float, help="mean photon number |alpha|^2")
    p.add_argument("--alpha-sq-min", type=float)
    p.add_argument("--alpha-sq-max", type=float)
    p.add_argument("--steps", type=int, help="sweep grid points (default 101)")
    p.add_argument("--grid", choices=GRIDS, help="sweep spacing (default linear)")
    p.add_argument("--eta", type=float, help="detection efficiency (default 1)")
    p.add_argument("--gamma", type=float, help="dark-count exponent (default 1e-8)")
    p.add_argument("--r1", type=float, help="first beam-splitter reflectance (default 2/3)")
    p.add_argument("--r2", type=float, help="second beam-splitter reflectance (default 1/2)")
    p.add_argument("--objective", choices=OBJECTIVES)
    p.add_argument("--schemes", help=f"comma-separated subset of {','.join(SCHEMES)}")
    p.add_argument("--target-error", type=float, help="decoding-error target (default 1e-9)")
    p.add_argument("--trials", type=int, help="Monte-Carlo trials per input (default 100000)")
    p.add_argument("--seed", type=int, help="Monte-Carlo seed (default 0)")
    p.add_argument("--threads", type=int, default=1, help="worker threads; output does not depend on it")
    p.add_argument("--format", choices=("csv", "json"), help="output format (default csv)")
    p.add_argument("--output", type=Path, help="write here instead of stdout")
    p.add_argument("--config", type=Path, help="JSON file with SweepConfig fields; flags override it")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ffpsk", description="Feedforward displacement receiver for weak 3-/4-PSK coherent states."
    )
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common_parser()
    sub.add_parser("matrix", parents=[common], help="exact and printed channel matrices with audit")
    sub.add_parser("sweep", parents=[common], help="figure data over a photon-number grid")
    sub.add_parser("simulate", parents=[common], help="Monte-Carlo channel estimate (JSON)")
    return parser


def _file_values(path: Path | None) -> dict:
    if path is None:
        return {}
    try:
        values = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise DomainError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(values, dict):
        raise DomainError("config file must hold a JSON object")
    return values


def _merged(args) -> dict:
    """File values overlaid by explicit flags."""
    values = _file_values(args.config)
    flag_map = {
        "m": args.m, "alpha_sq_min": args.alpha_sq_min, "alpha_sq_max": args.alpha_sq_max,
        "steps": args.steps, "grid": args.grid, "eta": args.eta, "gamma": args.gamma,
        "r1": args.r1, "r2": args.r2, "objective": args.objective,
        "target_error": args.target_error, "seed": args.seed,
        "alpha_sq": args.alpha_sq, "trials": args.trials, "format": args.format,
    }
    if args.schemes is not None:
        flag_map["schemes"] = [s.strip() for s in args.schemes.split(",") if s.strip()]
    values.update({k: v for k, v in flag_map.items() if v is not None})
    return values


def _receiver(values: dict) -> ReceiverConfig:
    keys = {"M": values.get("m", 4), "alpha_sq": values.get("alpha_sq", 1.0)}
    for k in ("eta", "gamma", "r1", "r2"):
        if k in values:
            keys[k] = values[k]
    return ReceiverConfig(**keys)


def _rows_text(name: str, a: np.ndarray) -> list[str]:
    return [f"# {name}"] + [",".join(format(float(x), ".17g") for x in row) for row in a]


def cmd_matrix(values: dict) -> str:
    config = _receiver(values)
    variant = "a1_4psk" if config.M == 4 else "a2_3psk"
    audit = appendix.appendix_matrix(config, variant)
    if values.get("format", "csv") == "json":
        return json.dumps({
            "config": {"M": config.M, "alpha_sq": config.alpha_sq, "eta": config.eta,
                       "gamma": config.gamma, "r1": config.r1, "r2": config.r2},
            "exact": audit.exact.tolist(),
            "appendix_variant": variant,
            "appendix": audit.printed.tolist(),
            "diff": audit.diff.tolist(),
            "flagged_entries": audit.flagged_entries(),
            "typo_terms": [d.describe() for d in audit.discrepancies],
        }, indent=2) + "\n"
    lines = _rows_text("exact P(j|i), row i = input", audit.exact)
    lines += _rows_text(f"printed appendix {variant}", audit.printed)
    lines += _rows_text("printed - exact", audit.diff)
    lines.append("# entries with |printed - exact| > 1e-12: "
                 + " ".join(f"P({j}|{i})" for i, j in audit.flagged_entries()))
    lines.append("# printed terms inconsistent with the tree")
    lines += [d.describe() for d in audit.discrepancies]
    return "\n".join(lines) + "\n"


def _sweep_config(values: dict) -> SweepConfig:
    values = dict(values)
    values.pop("format", None)
    values.pop("trials", None)
    alpha = values.pop("alpha_sq", None)
    if alpha is not None:
        values.setdefault("alpha_sq_min", alpha)
        values.setdefault("alpha_sq_max", alpha)
        values.setdefault("steps", 1)
    return SweepConfig.from_dict(values)


def cmd_sweep(values: dict, threads: int = 1) -> str:
    config = _sweep_config(values)
    rows = run_sweep(config, threads=threads)
    if values.get("format", "csv") == "json":
        return rows_to_json(config, rows)
    return rows_to_csv(rows)


def cmd_simulate(values: dict, threads: int = 1) -> str:
    config = _receiver(values)
    trials = values.get("trials", 100_000)
    seed = values.get("seed", 0)
    spec = SimulationSpec(config, trials, seed)
    report = estimate_channel_matrix(spec, build_decision_tree(config.M), threads=threads)
    exact = np.asarray(exact_channel_matrix(config))
    dev = np.abs(report.empirical - exact)
    sd = np.sqrt(exact * (1 - exact) / trials)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(sd > 0, dev / sd, np.where(dev > 0, np.inf, 0.0))
    max_z = float(z.max())
    return json.dumps({
        "config": {"M": config.M, "alpha_sq": config.alpha_sq, "eta": config.eta,
                   "gamma": config.gamma, "r1": config.r1, "r2": config.r2},
        "trials_per_input": trials,
        "seed": seed,
        "counts": report.counts.tolist(),
        "empirical": report.empirical.tolist(),
        "exact": exact.tolist(),
        "max_abs_deviation": float(dev.max()),
        "max_sigma_deviation": max_z if np.isfinite(max_z) else "inf",
        "entries_beyond_4_sigma": int((z > 4).sum()),
    }, indent=2) + "\n"


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error("--threads must be >= 1")
    try:
        values = _merged(args)
        if args.command == "matrix":
            text = cmd_matrix(values)
        elif args.command == "sweep":
            text = cmd_sweep(values, threads=args.threads)
        else:
            text = cmd_simulate(values, threads=args.threads)
    except NUMERICAL_ERRORS as exc:
        print(f"ffpsk: numerical failure: {exc}", file=sys.stderr)
        return 1
    except (ValueError, TypeError) as exc:
        parser.error(str(exc))
    if args.output is None:
        sys.stdout.write(text)
    else:
        args.output.write_text(text, encoding="utf-8", newline="\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
