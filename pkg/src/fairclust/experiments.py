"""Multi-trial experiment harness behind the CLI.

Each experiment kind reproduces one protocol: `single` aggregates repeated
seeded runs, `vary-k` / `vary-size` sweep a parameter, `trace` records
per-iteration costs, `order-invariance` re-runs the round-robin correction
under many center orders on one converged solution, and `ratio` delegates to
the exact-oracle bound experiment.

Determinism: trial seeds derive from (master seed, trial index) so re-running
reproduces every numeric column except wall-clock runtimes, and growing the
trial count never reshuffles earlier trials.
"""
from __future__ import annotations

import csv
import dataclasses
import io
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import AssignmentInstance, Dataset, validate_spec
from .data_io import load_csv, load_recipe
from .exceptions import ConfigError, EmptyTable, IoFailure
from .fair_assignment import RoundRobinOrder, fair_assignment, frac, frac_oe
from .lloyd import LloydConfig, run_lloyd
from .metrics import compute_report, objective_cost
from .oracle import brute_force_fair_assignment, ratio_experiment

ALGORITHMS = ("vanilla", "frac", "frac-oe", "oracle")
KINDS = ("single", "vary-k", "vary-size", "trace", "order-invariance", "ratio")
FORMATS = ("csv", "json")

# Spawn tag for per-size subsample seeds in vary-size sweeps.
_SUBSAMPLE_TAG = 0x5AB5


@dataclass
class ExperimentConfig:
    """Mirror of the JSON experiment-config schema (see README)."""

    kind: str = "single"
    algorithm: str = "frac"
    data: str | None = None
    recipe: str | None = None
    k: int = 10
    p: int = 2
    tau: object = "1/k"
    trials: int = 10
    seed: int = 0
    jobs: int = 1
    max_iters: int = 100
    rel_tol: float = 1e-4
    init: str = "uniform-sample"
    output: str | None = None
    format: str = "csv"
    figures: bool = True
    vary_k: tuple = ()
    vary_size: tuple = ()
    permutations: int = 100
    ratio_trials: int = 200
    ratio_k: int = 2
    ratio_size_bounds: tuple = (2, 12)
    ratio_d: int = 2
    ratio_spread: float = 10.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"algorithm must be one of {ALGORITHMS}")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.kind == "vary-k" and not self.vary_k:
            raise ConfigError("vary-k experiments need a nonempty vary_k list")
        if self.kind == "vary-size" and not self.vary_size:
            raise ConfigError("vary-size experiments need a nonempty vary_size list")
        if self.kind != "ratio" and self.data is None:
            raise ConfigError(f"kind={self.kind!r} needs a data CSV path")
        if self.data is not None and self.recipe is None:
            raise ConfigError("a recipe path must accompany the data path")


_CONFIG_KEYS = {f.name for f in dataclasses.fields(ExperimentConfig)}
_PATH_KEYS = ("data", "recipe", "output")


def load_experiment_config(path, **overrides) -> ExperimentConfig:
    """Read a JSON experiment config; keyword overrides win over file values.

    Relative data/recipe/output paths are resolved against the config file's
    directory.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"config {path} must hold a JSON object")
    unknown = set(raw) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"config {path} has unknown keys: {sorted(unknown)}")
    base = Path(path).parent
    for key in _PATH_KEYS:
        if raw.get(key) is not None:
            raw[key] = str((base / raw[key]).resolve()) if not Path(raw[key]).is_absolute() else raw[key]
    raw.update({k: v for k, v in overrides.items() if v is not None})
    for seq_key in ("vary_k", "vary_size", "ratio_size_bounds"):
        if seq_key in raw and raw[seq_key] is not None:
            raw[seq_key] = tuple(raw[seq_key])
    try:
        return ExperimentConfig(**raw)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def trial_seed(master_seed: int, trial_index: int) -> int:
    """Stable per-trial seed: hash of (master seed, trial index)."""
    ss = np.random.SeedSequence(master_seed, spawn_key=(trial_index,))
    return int(ss.generate_state(1, np.uint64)[0])


def resolve_tau(tau, k: int, dataset: Dataset):
    """Turn the config's tau field ("1/k", scalar, or vector) into a spec."""
    return validate_spec(tau, k, dataset)


def tau_label(tau) -> str:
    if isinstance(tau, str):
        return tau
    arr = np.atleast_1d(np.asarray(tau, dtype=np.float64))
    return ",".join(repr(float(v)) for v in arr)


def _run_trial(dataset: Dataset, tau, algorithm: str, lloyd_config: LloydConfig) -> dict:
    """One seeded run; returns flat metrics for aggregation."""
    spec = resolve_tau(tau, lloyd_config.k, dataset)
    p = lloyd_config.p
    start = time.perf_counter()
    if algorithm == "vanilla":
        res = run_lloyd(dataset, lloyd_config)
        elapsed = time.perf_counter() - start
        report = compute_report(dataset, res.clustering, spec, p)
        raw_vanilla = report.raw_cost_sum
        iterations, converged, corrected = res.iterations, res.converged, False
    elif algorithm == "frac-oe":
        res = frac_oe(dataset, spec, lloyd_config)
        elapsed = time.perf_counter() - start
        report = res.report
        vanilla_lp = res.trace[-2] if res.corrected else res.trace[-1]
        raw_vanilla = vanilla_lp**p
        iterations, converged, corrected = len(res.trace), res.converged, res.corrected
    elif algorithm == "frac":
        res = frac(dataset, spec, lloyd_config)
        elapsed = time.perf_counter() - start
        report = res.report
        vanilla = run_lloyd(dataset, lloyd_config)
        _, raw_vanilla = objective_cost(dataset, vanilla.clustering, p)
        iterations, converged, corrected = len(res.trace), res.converged, True
    elif algorithm == "oracle":
        vanilla = run_lloyd(dataset, lloyd_config)
        instance = AssignmentInstance(dataset, vanilla.clustering.centers, spec, p)
        clustering, _ = brute_force_fair_assignment(instance)
        elapsed = time.perf_counter() - start
        report = compute_report(dataset, clustering, spec, p)
        _, raw_vanilla = objective_cost(dataset, vanilla.clustering, p)
        iterations, converged, corrected = vanilla.iterations, vanilla.converged, True
    else:  # pragma: no cover - guarded by ExperimentConfig
        raise ConfigError(f"unknown algorithm {algorithm!r}")
    return {
        "raw_cost": report.raw_cost_sum,
        "objective_cost": report.objective_cost,
        "scaled_cost": report.raw_cost_sum / raw_vanilla if raw_vanilla > 0 else 1.0,
        "balance": report.balance,
        "fairness_error": report.fairness_error,
        "tau_satisfied": float(report.tau_satisfied),
        "mp_satisfied": float(report.mp_satisfied),
        "rd_satisfied": float(report.rd_satisfied),
        "iterations": float(iterations),
        "converged": float(converged),
        "corrected": float(corrected),
        "runtime_sec": elapsed,
    }


def _trial_worker(args) -> dict:
    dataset, tau, algorithm, lloyd_config = args
    return _run_trial(dataset, tau, algorithm, lloyd_config)


def _run_trials(dataset: Dataset, tau, algorithm: str, config: ExperimentConfig, k: int) -> list[dict]:
    jobs = [
        (
            dataset,
            tau,
            algorithm,
            LloydConfig(
                k=k,
                p=config.p,
                max_iters=config.max_iters,
                rel_tol=config.rel_tol,
                seed=trial_seed(config.seed, t),
                init=config.init,
            ),
        )
        for t in range(config.trials)
    ]
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            return list(pool.map(_trial_worker, jobs))
    return [_trial_worker(job) for job in jobs]


_METRIC_FIELDS = (
    "raw_cost",
    "objective_cost",
    "scaled_cost",
    "balance",
    "fairness_error",
)
_FRACTION_FIELDS = ("tau_satisfied", "mp_satisfied", "rd_satisfied", "converged", "corrected")


def _aggregate(trials: list[dict], keys: dict) -> dict:
    """Mean/std row in the stable column order: keys, metrics, runtime."""
    row = dict(keys)
    row["trials"] = len(trials)
    for name in _METRIC_FIELDS:
        values = np.array([t[name] for t in trials])
        row[f"{name}_mean"] = float(values.mean())
        row[f"{name}_std"] = float(values.std(ddof=1)) if len(values) > 1 else 0.0
    for name in _FRACTION_FIELDS:
        row[f"{name}_frac"] = float(np.mean([t[name] for t in trials]))
    row["iterations_mean"] = float(np.mean([t["iterations"] for t in trials]))
    runtimes = np.array([t["runtime_sec"] for t in trials])
    row["runtime_mean"] = float(runtimes.mean())
    row["runtime_std"] = float(runtimes.std(ddof=1)) if len(runtimes) > 1 else 0.0
    return row


def _load_dataset(config: ExperimentConfig, size: int | None = None) -> Dataset:
    recipe = load_recipe(config.recipe)
    if size is not None:
        recipe = dataclasses.replace(
            recipe,
            subsample_count=size,
            subsample_seed=int(
                np.random.SeedSequence(config.seed, spawn_key=(_SUBSAMPLE_TAG, size)).generate_state(1, np.uint64)[0]
            ),
        )
    return load_csv(config.data, recipe)


def run_experiment(config: ExperimentConfig) -> list[dict]:
    """Execute one experiment and return its result table (list of rows)."""
    if config.kind == "ratio":
        reports, summary = ratio_experiment(
            config.ratio_trials,
            config.ratio_k,
            config.ratio_size_bounds,
            config.seed,
            d=config.ratio_d,
            spread=config.ratio_spread,
        )
        rows = [
            {"trial": i, **report.to_dict()}
            for i, report in enumerate(reports)
        ]
        return rows

    dataset = _load_dataset(config)
    base_keys = {
        "kind": config.kind,
        "algorithm": config.algorithm,
        "dataset": Path(config.data).stem,
        "n": dataset.n,
        "m": dataset.m,
        "k": config.k,
        "p": config.p,
        "tau": tau_label(config.tau),
        "seed": config.seed,
    }

    if config.kind == "single":
        trials = _run_trials(dataset, config.tau, config.algorithm, config, config.k)
        return [_aggregate(trials, base_keys)]

    if config.kind == "vary-k":
        rows = []
        for k in config.vary_k:
            trials = _run_trials(dataset, config.tau, config.algorithm, config, int(k))
            rows.append(_aggregate(trials, {**base_keys, "k": int(k)}))
        return rows

    if config.kind == "vary-size":
        rows = []
        for size in config.vary_size:
            sized = _load_dataset(config, size=int(size))
            trials = _run_trials(sized, config.tau, config.algorithm, config, config.k)
            rows.append(_aggregate(trials, {**base_keys, "n": sized.n, "size": int(size)}))
        return rows

    if config.kind == "trace":
        rows = []
        for t in range(config.trials):
            lloyd_config = LloydConfig(
                k=config.k, p=config.p, max_iters=config.max_iters,
                rel_tol=config.rel_tol, seed=trial_seed(config.seed, t), init=config.init,
            )
            spec = resolve_tau(config.tau, config.k, dataset)
            runs = {
                "vanilla": run_lloyd(dataset, lloyd_config).trace,
                "frac-oe": frac_oe(dataset, spec, lloyd_config).trace,
                "frac": frac(dataset, spec, lloyd_config).trace,
            }
            for name, trace in runs.items():
                for it, cost in enumerate(trace):
                    rows.append(
                        {
                            "kind": "trace",
                            "algorithm": name,
                            "trial": t,
                            "iteration": it,
                            "cost": float(cost),
                        }
                    )
        return rows

    if config.kind == "order-invariance":
        spec = resolve_tau(config.tau, config.k, dataset)
        lloyd_config = LloydConfig(
            k=config.k, p=config.p, max_iters=config.max_iters,
            rel_tol=config.rel_tol, seed=config.seed, init=config.init,
        )
        vanilla = run_lloyd(dataset, lloyd_config)
        instance = AssignmentInstance(dataset, vanilla.clustering.centers, spec, config.p)
        rows = []
        for i in range(config.permutations):
            order = RoundRobinOrder.draw(config.k, trial_seed(config.seed, i))
            corrected = fair_assignment(instance, vanilla.clustering.assignment, order)
            l_cost, raw = objective_cost(dataset, corrected, config.p)
            rows.append(
                {
                    "kind": "order-invariance",
                    "permutation": i,
                    "order": ",".join(str(int(j)) for j in order.permutation),
                    "objective_cost": l_cost,
                    "raw_cost": raw,
                }
            )
        return rows

    raise ConfigError(f"unhandled kind {config.kind!r}")  # pragma: no cover


def format_table(table: list[dict], fmt: str) -> str:
    """Render rows as CSV (header + rows) or a JSON array; bit-stable."""
    if not table:
        raise EmptyTable("no rows to emit")
    if fmt not in FORMATS:
        raise ConfigError(f"format must be one of {FORMATS}")
    columns = list(table[0].keys())
    for row in table:
        if list(row.keys()) != columns:
            raise EmptyTable("rows disagree on columns")
    if fmt == "json":
        return json.dumps(table, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in table:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row.values()])
    return buf.getvalue()


def emit_results(table: list[dict], fmt: str, path) -> None:
    """Write the table to disk; floats survive a CSV round-trip exactly."""
    text = format_table(table, fmt)
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from None
