"""Figure rendering for experiment tables.

Each experiment kind gets one PNG written next to the delimited output file:
cost/balance summaries for aggregate kinds, per-iteration curves for traces,
a histogram for order-invariance, and a ratio-vs-size scatter for the oracle
bound experiment.
"""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .exceptions import EmptyTable, IoFailure


def _figure_path(path, kind: str) -> Path:
    out = Path(path)
    return out.with_name(f"{out.stem}_{kind}.png")


def _save(fig, target: Path) -> Path:
    try:
        fig.savefig(target, dpi=120, bbox_inches="tight")
    except OSError as exc:
        raise IoFailure(f"cannot write figure {target}: {exc}") from None
    finally:
        plt.close(fig)
    return target


def _errorbar(ax, xs, means, stds, label=None):
    ax.errorbar(xs, means, yerr=stds, marker="o", capsize=3, label=label)


def render_figures(kind: str, table: list[dict], path) -> list[Path]:
    """Render the figure(s) for one experiment table.

    `path` is the delimited output file; figures are written alongside it and
    the written paths are returned.
    """
    if not table:
        raise EmptyTable("no rows to plot")
    target = _figure_path(path, kind)

    if kind in ("single", "vary-k", "vary-size"):
        if kind == "vary-k":
            xs = [row["k"] for row in table]
            xlabel = "clusters k"
        elif kind == "vary-size":
            xs = [row["n"] for row in table]
            xlabel = "points n"
        else:
            xs = [row["algorithm"] for row in table]
            xlabel = "algorithm"
        fig, axes = plt.subplots(1, 3, figsize=(12, 3.5))
        _errorbar(axes[0], xs, [r["scaled_cost_mean"] for r in table], [r["scaled_cost_std"] for r in table])
        axes[0].set_ylabel("cost / vanilla cost")
        _errorbar(axes[1], xs, [r["balance_mean"] for r in table], [r["balance_std"] for r in table])
        axes[1].set_ylabel("balance")
        _errorbar(axes[2], xs, [r["runtime_mean"] for r in table], [r["runtime_std"] for r in table])
        axes[2].set_ylabel("runtime (s)")
        if kind == "vary-size":
            axes[2].set_xscale("log")
            axes[2].set_yscale("log")
        for ax in axes:
            ax.set_xlabel(xlabel)
            ax.grid(True, alpha=0.3)
        fig.suptitle(f"{table[0].get('algorithm', '')} on {table[0].get('dataset', '')}")
        return [_save(fig, target)]

    if kind == "trace":
        fig, ax = plt.subplots(figsize=(6, 4))
        series: dict[tuple, list[tuple[int, float]]] = {}
        for row in table:
            series.setdefault((row["algorithm"], row["trial"]), []).append((row["iteration"], row["cost"]))
        seen = set()
        colors = {"vanilla": "tab:gray", "frac-oe": "tab:orange", "frac": "tab:blue"}
        for (name, _), points in series.items():
            points.sort()
            label = name if name not in seen else None
            seen.add(name)
            ax.plot([p[0] for p in points], [p[1] for p in points], color=colors.get(name), alpha=0.6, label=label)
        ax.set_xlabel("iteration")
        ax.set_ylabel("clustering cost")
        ax.legend()
        ax.grid(True, alpha=0.3)
        return [_save(fig, target)]

    if kind == "order-invariance":
        fig, ax = plt.subplots(figsize=(6, 4))
        costs = [row["raw_cost"] for row in table]
        ax.hist(costs, bins=20, color="tab:blue", alpha=0.8)
        ax.set_xlabel("post-correction cost")
        ax.set_ylabel("orders")
        ax.grid(True, alpha=0.3)
        return [_save(fig, target)]

    if kind == "ratio":
        fig, ax = plt.subplots(figsize=(6, 4))
        ns = [row["n"] for row in table]
        ratios = [row["ratio"] for row in table]
        bounds = [
            (2.0 * row["opt_cost"] + row["beta"]) / row["opt_cost"]
            if row["opt_cost"] > 0
            else float("nan")
            for row in table
        ]
        ax.scatter(ns, ratios, s=14, label="measured ratio", color="tab:blue")
        ax.scatter(ns, bounds, s=14, label="guaranteed bound / opt", color="tab:red", alpha=0.5, marker="x")
        ax.set_xlabel("points n")
        ax.set_ylabel("cost ratio vs optimum")
        ax.legend()
        ax.grid(True, alpha=0.3)
        return [_save(fig, target)]

    raise EmptyTable(f"no figure defined for kind {kind!r}")
