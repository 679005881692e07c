"""Command line interface.

    fracsource run   --config exp.cfg [--out DIR] [--seed N]
    fracsource sweep --config exp.cfg --param sigma --values 0,0.01,0.05 [--out DIR]
    fracsource check --suite {fraccalc|forward|rci|duhamel}

Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 I/O error.
The FRACSOURCE_OUT environment variable sets the default output root.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from .checks import SUITES, run_suite
from .experiments import (
    ExperimentConfig,
    UsageError,
    parse_config,
    resolve_output_dir,
    run_experiment,
    sweep,
)
from .inverse import DivergenceError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_IO = 3


def _load_config(path: str) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise _IOFailure(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)


class _IOFailure(Exception):
    pass


def _cmd_run(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config)
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    out = resolve_output_dir(cfg, args.out)
    summary = run_experiment(cfg, out)
    rel = (
        "n/a"
        if summary.relative_l2_error is None
        else f"{summary.relative_l2_error:.4e}"
    )
    print(
        f"run: iterations={summary.iterations_used} converged={summary.converged} "
        f"rel_l2_error={rel} wall={summary.wall_time:.2f}s -> {out}"
    )
    return EXIT_OK


def _cmd_sweep(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config)
    values = [v for v in args.values.split(",") if v != ""]
    out = resolve_output_dir(cfg, args.out)
    summaries = sweep(cfg, args.param, values, out if values else None)
    for v, s in zip(values, summaries):
        rel = "n/a" if s.relative_l2_error is None else f"{s.relative_l2_error:.4e}"
        print(
            f"sweep {args.param}={v}: iterations={s.iterations_used} "
            f"converged={s.converged} rel_l2_error={rel}"
        )
    print(f"sweep: {len(summaries)} runs -> {out}")
    return EXIT_OK


def _cmd_check(args: argparse.Namespace) -> int:
    ok, lines = run_suite(args.suite)
    for line in lines:
        print(f"check[{args.suite}] {line}")
    print(f"check[{args.suite}] {'PASS' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_NUMERICAL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="fracsource",
        description="Temporal source reconstruction for time-fractional diffusion",
    )
    sub = p.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one experiment from a config file")
    run_p.add_argument("--config", required=True)
    run_p.add_argument("--out", default=None)
    run_p.add_argument("--seed", type=int, default=None)
    run_p.set_defaults(func=_cmd_run)

    sweep_p = sub.add_parser("sweep", help="run a parameter sweep")
    sweep_p.add_argument("--config", required=True)
    sweep_p.add_argument("--param", required=True)
    sweep_p.add_argument("--values", required=True)
    sweep_p.add_argument("--out", default=None)
    sweep_p.set_defaults(func=_cmd_sweep)

    check_p = sub.add_parser("check", help="run a diagnostics suite")
    check_p.add_argument("--suite", required=True, choices=sorted(SUITES))
    check_p.set_defaults(func=_cmd_check)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except _IOFailure as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    except DivergenceError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    raise SystemExit(main())
