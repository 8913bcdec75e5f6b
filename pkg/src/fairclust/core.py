"""Shared domain types: datasets with protected groups, quota specs, clusterings.

All numeric payloads are float64 and all label/index arrays int64. Every type
is immutable after construction (arrays are marked read-only) so instances can
be shared freely across threads and processes.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .exceptions import (
    ConfigError,
    EmptyDataset,
    InfeasibleQuota,
    LengthMismatch,
    RaggedDimensions,
    TauOutOfRange,
)

# Slack used when flooring tau * n_l: products like (1/k) * (multiple of k)
# can land one ulp under the exact integer and must not lose a whole unit.
_FLOOR_EPS = 1e-9


def _readonly(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, copy=True)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class Dataset:
    """A point set with one protected-group label per point.

    Attributes:
        points: (n, d) float64 feature matrix.
        groups: (n,) int64 dense labels in {0..m-1}; every value occurs.
        m: number of distinct groups.
        label_names: original labels, indexed by dense label.
    """

    points: np.ndarray
    groups: np.ndarray
    m: int
    label_names: tuple = ()

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    @cached_property
    def group_counts(self) -> np.ndarray:
        """(m,) int64 — number of points in each group (n_l)."""
        counts = np.bincount(self.groups, minlength=self.m).astype(np.int64)
        counts.flags.writeable = False
        return counts

    def group_indices(self, label: int) -> np.ndarray:
        """Ascending point indices belonging to one group."""
        return np.nonzero(self.groups == label)[0]


def validate_dataset(raw_points, raw_groups) -> Dataset:
    """Build a Dataset, densely re-indexing group labels to 0..m-1.

    Accepts any sequence of equal-length numeric vectors (or scalars for 1-D
    data) plus one label per point; labels may be arbitrary hashables and are
    re-indexed in sorted order, with the originals kept in `label_names`.
    """
    try:
        points = np.asarray(raw_points, dtype=np.float64)
    except (ValueError, TypeError) as exc:
        raise RaggedDimensions(str(exc)) from None
    if points.ndim == 1:
        points = points.reshape(-1, 1)
    if points.ndim != 2:
        raise RaggedDimensions(f"points must be 2-D, got shape {points.shape}")
    if points.shape[0] == 0:
        raise EmptyDataset("no points")
    if points.shape[1] == 0:
        raise RaggedDimensions("points must have d >= 1")

    groups_in = np.asarray(raw_groups)
    if groups_in.ndim != 1 or groups_in.shape[0] != points.shape[0]:
        raise LengthMismatch(
            f"{groups_in.shape[0] if groups_in.ndim == 1 else groups_in.shape} "
            f"labels for {points.shape[0]} points"
        )
    names, dense = np.unique(groups_in, return_inverse=True)
    return Dataset(
        points=_readonly(points),
        groups=_readonly(dense.astype(np.int64)),
        m=int(names.shape[0]),
        label_names=tuple(names.tolist()),
    )


@dataclass(frozen=True)
class FairnessSpec:
    """Per-group quota fractions for a k-clustering.

    Attributes:
        tau: (m,) float64 fractions, each in [0, 1/k].
        k: cluster count.
        quotas: (m,) int64 — floor(tau[l] * n_l), computed once at validation;
            the minimum number of group-l points every cluster must receive.
    """

    tau: np.ndarray
    k: int
    quotas: np.ndarray


def validate_spec(tau, k: int, dataset: Dataset) -> FairnessSpec:
    """Check the tau range and store integer quotas.

    tau may be a scalar (applied to all groups), a length-m vector, or a
    string: "1/k", one number, or comma-separated per-group numbers.
    Raises TauOutOfRange if any component leaves [0, 1/k], LengthMismatch on a
    wrong-length vector. Quotas floor(tau[l] * n_l) are feasible by
    construction (k * quota <= n_l whenever tau <= 1/k); the guard is asserted
    anyway.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if isinstance(tau, str):
        text = tau.strip()
        if text == "1/k":
            tau = 1.0 / k
        else:
            try:
                values = [float(part) for part in text.split(",")]
            except ValueError:
                raise ConfigError(f"cannot parse tau {tau!r}") from None
            tau = values[0] if len(values) == 1 else values
    tau_arr = np.asarray(tau, dtype=np.float64)
    if tau_arr.ndim == 0:
        tau_arr = np.full(dataset.m, float(tau_arr))
    if tau_arr.shape != (dataset.m,):
        raise LengthMismatch(
            f"tau has length {tau_arr.shape}, dataset has m={dataset.m}"
        )
    bound = 1.0 / k
    for l, value in enumerate(tau_arr):
        if not np.isfinite(value) or value < 0.0 or value > bound + 1e-12:
            raise TauOutOfRange(l, float(value), k)

    counts = dataset.group_counts
    quotas = np.minimum(
        np.floor(tau_arr * counts + _FLOOR_EPS).astype(np.int64),
        counts // k,
    )
    if np.any(quotas * k > counts):
        raise InfeasibleQuota(
            f"quotas {quotas.tolist()} infeasible for counts {counts.tolist()}"
        )
    return FairnessSpec(tau=_readonly(tau_arr), k=int(k), quotas=_readonly(quotas))


@dataclass(frozen=True)
class Clustering:
    """k centers plus a total assignment of every point to one center."""

    centers: np.ndarray
    assignment: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "centers", _readonly(np.atleast_2d(np.asarray(self.centers, dtype=np.float64))))
        object.__setattr__(self, "assignment", _readonly(np.asarray(self.assignment, dtype=np.int64)))

    @property
    def k(self) -> int:
        return self.centers.shape[0]


@dataclass(frozen=True)
class AssignmentInstance:
    """A fair-assignment problem: fixed centers, dataset, quotas, and norm p."""

    dataset: Dataset
    centers: np.ndarray
    spec: FairnessSpec
    p: int

    def __post_init__(self):
        centers = np.atleast_2d(np.asarray(self.centers, dtype=np.float64))
        object.__setattr__(self, "centers", _readonly(centers))
        if self.p not in (1, 2):
            raise ValueError(f"p must be 1 or 2, got {self.p}")
        if self.spec.k != centers.shape[0]:
            raise LengthMismatch(
                f"spec.k={self.spec.k} but {centers.shape[0]} centers"
            )
        if centers.shape[1] != self.dataset.d:
            raise RaggedDimensions(
                f"centers are {centers.shape[1]}-D, points are {self.dataset.d}-D"
            )
        if np.any(self.spec.quotas * self.spec.k > self.dataset.group_counts):
            raise InfeasibleQuota("quotas exceed group sizes")


@dataclass(frozen=True)
class MetricsReport:
    """Evaluation bundle for one clustering against one quota spec.

    balance_degenerate flags the convention case where some cluster misses a
    group entirely (balance is then 0 by definition).
    """

    objective_cost: float
    raw_cost_sum: float
    balance: float
    fairness_error: float
    tau_satisfied: bool
    mp_satisfied: bool
    rd_satisfied: bool
    balance_degenerate: bool = False


def cluster_group_counts(dataset: Dataset, assignment: np.ndarray, k: int) -> np.ndarray:
    """(k, m) int64 matrix of group-l points landing in cluster j."""
    flat = assignment * dataset.m + dataset.groups
    counts = np.bincount(flat, minlength=k * dataset.m)
    return counts.reshape(k, dataset.m).astype(np.int64)
