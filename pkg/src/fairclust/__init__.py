"""Fairness-constrained center-based clustering.

Lloyd-style k-means/k-medians plus a round-robin correction stage that
guarantees every cluster a per-group floor of points, with exact small-instance
oracles, quality metrics, and a reproducible experiment harness.
"""
from .core import (
    AssignmentInstance,
    Clustering,
    Dataset,
    FairnessSpec,
    MetricsReport,
    cluster_group_counts,
    validate_dataset,
    validate_spec,
)
from .data_io import DatasetRecipe, dataset_balance, load_csv, load_recipe
from .exceptions import (
    ConfigError,
    EmptyDataset,
    EmptyTable,
    FairclustError,
    InfeasibleQuota,
    IoFailure,
    LengthMismatch,
    MissingColumn,
    NonNumericCell,
    RaggedDimensions,
    SingleGroup,
    TauOutOfRange,
    TooFewPoints,
    TooLarge,
)
from .experiments import (
    ExperimentConfig,
    emit_results,
    load_experiment_config,
    run_experiment,
    trial_seed,
)
from .fair_assignment import (
    FairClusteringResult,
    RoundRobinOrder,
    check_tau_ratio,
    fair_assignment,
    frac,
    frac_oe,
    order_stream,
)
from .lloyd import (
    LloydConfig,
    LloydResult,
    assign_nearest,
    initialize_centers,
    run_lloyd,
    update_centers,
)
from .metrics import (
    balance,
    balance_lower_bound,
    compute_report,
    fairness_error,
    mp_rd_check,
    objective_cost,
)
from .oracle import (
    RatioReport,
    assignment_cost,
    brute_force_fair_assignment,
    max_pairwise_distance,
    measure_ratio,
    random_instance,
    ratio_experiment,
    worst_case_instance,
    worst_case_ratio,
)
from .plots import render_figures

__version__ = "0.1.0"

__all__ = [
    "AssignmentInstance",
    "Clustering",
    "ConfigError",
    "Dataset",
    "DatasetRecipe",
    "EmptyDataset",
    "EmptyTable",
    "ExperimentConfig",
    "FairClusteringResult",
    "FairclustError",
    "FairnessSpec",
    "InfeasibleQuota",
    "IoFailure",
    "LengthMismatch",
    "LloydConfig",
    "LloydResult",
    "MetricsReport",
    "MissingColumn",
    "NonNumericCell",
    "RaggedDimensions",
    "RatioReport",
    "RoundRobinOrder",
    "SingleGroup",
    "TauOutOfRange",
    "TooFewPoints",
    "TooLarge",
    "assign_nearest",
    "assignment_cost",
    "balance",
    "balance_lower_bound",
    "brute_force_fair_assignment",
    "check_tau_ratio",
    "cluster_group_counts",
    "compute_report",
    "dataset_balance",
    "emit_results",
    "fair_assignment",
    "fairness_error",
    "frac",
    "frac_oe",
    "initialize_centers",
    "load_csv",
    "load_experiment_config",
    "load_recipe",
    "max_pairwise_distance",
    "measure_ratio",
    "mp_rd_check",
    "objective_cost",
    "order_stream",
    "random_instance",
    "ratio_experiment",
    "render_figures",
    "run_experiment",
    "run_lloyd",
    "trial_seed",
    "update_centers",
    "validate_dataset",
    "validate_spec",
    "worst_case_instance",
    "worst_case_ratio",
]
