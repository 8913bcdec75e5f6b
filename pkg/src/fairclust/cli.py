"""Command-line entry point.

`fairclust run --config experiment.json` executes one experiment described by
a JSON config; flags override individual config fields. Results are written as
CSV or JSON, with figures rendered next to the output file unless disabled.

Exit codes: 0 success, 1 bad config or flags, 2 runtime failure.
"""
from __future__ import annotations

import argparse
import sys
import traceback

import numpy as np

from .exceptions import ConfigError, FairclustError
from .experiments import (
    ALGORITHMS,
    FORMATS,
    KINDS,
    load_experiment_config,
    run_experiment,
    emit_results,
)
from .plots import render_figures


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad flags; remap to the config code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fairclust", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="execute one experiment from a JSON config")
    run.add_argument("--config", required=True, help="experiment config JSON path")
    run.add_argument("--kind", choices=KINDS, help="override the experiment kind")
    run.add_argument("--algorithm", choices=ALGORITHMS, help="override the algorithm")
    run.add_argument("--data", help="override the dataset CSV path")
    run.add_argument("--recipe", help="override the dataset recipe path")
    run.add_argument("--k", type=int, help="override the cluster count")
    run.add_argument("--tau", help='override tau: "1/k", a scalar, or comma-separated values')
    run.add_argument("--p", type=int, choices=(1, 2), help="override the objective norm")
    run.add_argument("--trials", type=int, help="override the trial count")
    run.add_argument("--seed", type=int, help="override the master seed")
    run.add_argument("--jobs", type=int, help="override parallel worker count")
    run.add_argument("--output", help="override the output file path")
    run.add_argument("--format", choices=FORMATS, help="override the output format")
    run.add_argument(
        "--no-figures", action="store_true", help="skip figure rendering"
    )
    return parser


_OVERRIDE_FLAGS = (
    "kind",
    "algorithm",
    "data",
    "recipe",
    "k",
    "tau",
    "p",
    "trials",
    "seed",
    "jobs",
    "output",
    "format",
)


def _summarize(kind: str, table: list[dict]) -> str:
    if kind == "ratio":
        ratios = [row["ratio"] for row in table if np.isfinite(row["ratio"])]
        violations = sum(not row["bound_satisfied"] for row in table)
        peak = max(ratios) if ratios else float("nan")
        return f"ratio trials={len(table)} violations={violations} max_ratio={peak:.4f}"
    if kind == "order-invariance":
        costs = np.array([row["raw_cost"] for row in table])
        rel = float(costs.std() / costs.mean()) if costs.mean() > 0 else 0.0
        return f"orders={len(table)} cost_rel_std={rel:.6f}"
    return f"rows={len(table)}"


def _run(args) -> int:
    overrides = {name: getattr(args, name) for name in _OVERRIDE_FLAGS}
    if args.no_figures:
        overrides["figures"] = False
    config = load_experiment_config(args.config, **overrides)
    table = run_experiment(config)
    out_path = config.output or f"fairclust-{config.kind}.{config.format}"
    emit_results(table, config.format, out_path)
    print(f"wrote {len(table)} rows to {out_path}")
    print(_summarize(config.kind, table))
    if config.figures:
        for figure in render_figures(config.kind, table, out_path):
            print(f"wrote figure {figure}")
    return 0


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _run(args)
    except ConfigError as exc:
        print(f"fairclust: config error: {exc}", file=sys.stderr)
        return 1
    except FairclustError as exc:
        print(f"fairclust: error: {exc}", file=sys.stderr)
        return 2
    except Exception:
        traceback.print_exc()
        return 2


if __name__ == "__main__":
    sys.exit(main())
