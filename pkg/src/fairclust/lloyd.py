"""Unconstrained Lloyd-style (k, p)-clustering.

p = 2 is classic k-means (mean center update), p = 1 is k-median with a
coordinate-wise median update. Every tie is broken by lowest index so runs
are bit-reproducible given (dataset, config).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Clustering, Dataset
from .exceptions import TooFewPoints
from .metrics import objective_cost, squared_distances


@dataclass(frozen=True)
class LloydConfig:
    """Solver knobs.

    Attributes:
        k: cluster count.
        p: objective norm, 1 (k-median) or 2 (k-means).
        max_iters: iteration cap, >= 1.
        rel_tol: relative objective-change threshold for convergence.
        seed: RNG seed for center initialization.
        init: "uniform-sample" picks k distinct data points uniformly;
            "k-means++" uses squared-distance-weighted seeding.
    """

    k: int
    p: int = 2
    max_iters: int = 100
    rel_tol: float = 1e-4
    seed: int = 0
    init: str = "uniform-sample"

    def __post_init__(self):
        if self.p not in (1, 2):
            raise ValueError(f"p must be 1 or 2, got {self.p}")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.rel_tol < 0:
            raise ValueError("rel_tol must be >= 0")
        if self.init not in ("uniform-sample", "k-means++"):
            raise ValueError(f"unknown init {self.init!r}")


@dataclass(frozen=True)
class LloydResult:
    clustering: Clustering
    trace: tuple
    converged: bool
    reseed_iterations: tuple = ()

    @property
    def iterations(self) -> int:
        return len(self.trace)


def initialize_centers(dataset: Dataset, config: LloydConfig) -> np.ndarray:
    """Choose k distinct data points as starting centers."""
    n = dataset.n
    if n < config.k:
        raise TooFewPoints(f"n={n} < k={config.k}")
    rng = np.random.default_rng(config.seed)
    if config.init == "uniform-sample":
        idx = rng.choice(n, size=config.k, replace=False)
        return dataset.points[np.sort(idx)].copy()
    # k-means++: first center uniform, then squared-distance weighting.
    chosen = [int(rng.integers(n))]
    for _ in range(config.k - 1):
        d2 = squared_distances(dataset.points, dataset.points[chosen]).min(axis=1)
        total = d2.sum()
        if total > 0.0:
            probs = d2 / total
            chosen.append(int(rng.choice(n, p=probs)))
        else:
            # All remaining mass coincides with chosen centers; fall back to
            # uniform among unchosen indices to keep the k points distinct.
            available = np.setdiff1d(np.arange(n), np.array(chosen))
            chosen.append(int(rng.choice(available)))
    return dataset.points[np.array(chosen)].copy()


def assign_nearest(dataset: Dataset, centers: np.ndarray, p: int = 2) -> np.ndarray:
    """Map each point to its nearest center (Euclidean; ties to lowest index).

    The norm p does not affect nearest-center order, only cost evaluation.
    """
    d2 = squared_distances(dataset.points, np.atleast_2d(centers))
    return np.argmin(d2, axis=1).astype(np.int64)


def update_centers(
    dataset: Dataset,
    assignment: np.ndarray,
    k: int,
    p: int,
    prev_centers: np.ndarray | None = None,
) -> np.ndarray:
    """Recompute centers: mean for p=2, coordinate-wise median for p=1.

    An empty cluster is re-seeded to the point farthest from its assigned
    center (ties to lowest point index); with several empty clusters, each
    re-seed in ascending cluster order takes the next-farthest distinct point.
    Distances are measured against prev_centers when given, else against the
    freshly updated centers.
    """
    X = dataset.points
    new = np.empty((k, dataset.d), dtype=np.float64)
    empty = []
    for j in range(k):
        members = X[assignment == j]
        if members.shape[0] == 0:
            empty.append(j)
        elif p == 2:
            new[j] = members.mean(axis=0)
        else:
            new[j] = np.median(members, axis=0)
    if empty:
        # Every point's own cluster is nonempty, so ref[assignment] is valid
        # even before the empty slots are filled.
        ref = prev_centers if prev_centers is not None else new
        diff = X - ref[assignment]
        dist = np.einsum("nd,nd->n", diff, diff)
        for j in empty:
            pick = int(np.argmax(dist))
            new[j] = X[pick]
            dist[pick] = -1.0
    return new


def _relative_change(prev: float, cur: float) -> float:
    return abs(prev - cur) / max(abs(prev), 1e-300)


def run_lloyd(dataset: Dataset, config: LloydConfig) -> LloydResult:
    """Iterate assign/update until the relative L_p change drops below rel_tol.

    The trace holds one L_p value per iteration, evaluated on that iteration's
    (updated centers, assignment) pair; for p=2 it is non-increasing except
    across empty-cluster re-seeds, which are recorded in reseed_iterations.
    """
    centers = initialize_centers(dataset, config)
    trace: list[float] = []
    reseeds: list[int] = []
    prev_cost = None
    converged = False
    assignment = None
    for it in range(config.max_iters):
        assignment = assign_nearest(dataset, centers, config.p)
        if np.bincount(assignment, minlength=config.k).min() == 0:
            reseeds.append(it)
        centers = update_centers(dataset, assignment, config.k, config.p, prev_centers=centers)
        cost, _ = objective_cost(dataset, Clustering(centers, assignment), config.p)
        trace.append(cost)
        if prev_cost is not None and _relative_change(prev_cost, cost) < config.rel_tol:
            converged = True
            break
        prev_cost = cost
    return LloydResult(
        clustering=Clustering(centers, assignment),
        trace=tuple(trace),
        converged=converged,
        reseed_iterations=tuple(reseeds),
    )
