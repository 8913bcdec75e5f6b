"""Quota-fair assignment: round-robin correction and the two solver loops.

The fairness contract: every cluster must receive at least
floor(tau[l] * n_l) points of each group l. `fair_assignment` enforces it for
fixed centers by letting centers claim nearest unassigned points in a random
round-robin order; `frac_oe` applies that once after vanilla clustering
converges (post-processing), `frac` applies it inside every iteration
(in-processing).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    AssignmentInstance,
    Clustering,
    Dataset,
    FairnessSpec,
    cluster_group_counts,
)
from .lloyd import LloydConfig, assign_nearest, initialize_centers, run_lloyd, _relative_change
from .metrics import compute_report, objective_cost, squared_distances

# Spawn tag separating the round-robin order stream from the center-init
# stream, so the two sources of randomness are independently controllable.
_ORDER_STREAM_TAG = 0x0FDE


@dataclass(frozen=True)
class RoundRobinOrder:
    """A fixed random ordering of the k centers for one claiming phase."""

    permutation: np.ndarray
    seed: int | None = None

    def __post_init__(self):
        perm = np.asarray(self.permutation, dtype=np.int64)
        if sorted(perm.tolist()) != list(range(perm.shape[0])):
            raise ValueError(f"not a permutation: {perm.tolist()}")
        perm = perm.copy()
        perm.flags.writeable = False
        object.__setattr__(self, "permutation", perm)

    @classmethod
    def draw(cls, k: int, seed: int) -> "RoundRobinOrder":
        rng = np.random.default_rng(seed)
        return cls(permutation=rng.permutation(k), seed=seed)

    @classmethod
    def from_rng(cls, k: int, rng: np.random.Generator) -> "RoundRobinOrder":
        return cls(permutation=rng.permutation(k), seed=None)


def order_stream(seed: int) -> np.random.Generator:
    """RNG dedicated to drawing center orders, decoupled from init randomness."""
    return np.random.default_rng(
        np.random.SeedSequence(seed, spawn_key=(_ORDER_STREAM_TAG,))
    )


def check_tau_ratio(dataset: Dataset, assignment: np.ndarray, spec: FairnessSpec):
    """Quota check plus shortfall detail.

    Returns (ok, deficits) where deficits is a (k, m) int64 matrix of
    max(0, quota_l - count_jl); ok is True iff all deficits are zero.
    """
    counts = cluster_group_counts(dataset, assignment, spec.k)
    deficits = np.maximum(spec.quotas[None, :] - counts, 0)
    return bool(np.all(deficits == 0)), deficits


@dataclass(frozen=True)
class FairClusteringResult:
    """Output bundle of frac / frac_oe.

    trace: per-iteration L_p costs. For frac_oe it is the vanilla trace plus,
    when the correction fired, one final post-correction entry. corrected is
    True when a round-robin correction ran (always, for frac). report is the
    full metrics bundle of the returned clustering.
    """

    clustering: Clustering
    trace: tuple
    report: object
    corrected: bool
    converged: bool = True


def fair_assignment(
    instance: AssignmentInstance,
    prior_assignment: np.ndarray,
    order: RoundRobinOrder,
) -> Clustering:
    """Round-robin quota enforcement for fixed centers.

    Groups are processed in ascending label order. Within a group, quota many
    rounds run; in each round every center, following `order`, claims its
    nearest still-unassigned point of that group (distance ties to the lowest
    point index). Leftover points revert to prior_assignment. Centers are then
    recomputed from the new assignment (mean for p=2, coordinate-wise median
    for p=1; a cluster left empty keeps its previous center).

    The output satisfies check_tau_ratio by construction. Cost against the
    *original* centers is what the approximation guarantees speak about; use
    `metrics.objective_cost` with a Clustering built from instance.centers if
    that is the quantity of interest.
    """
    dataset, spec = instance.dataset, instance.spec
    k = spec.k
    prior = np.asarray(prior_assignment, dtype=np.int64)
    new_assign = np.full(dataset.n, -1, dtype=np.int64)

    for label in range(dataset.m):
        quota = int(spec.quotas[label])
        if quota == 0:
            continue
        idx = dataset.group_indices(label)
        d2 = squared_distances(dataset.points[idx], instance.centers)
        # Pre-sort each center's view of the group once; stable sort makes
        # equal distances fall back to ascending point index.
        by_center = np.argsort(d2, axis=0, kind="stable")
        cursors = np.zeros(k, dtype=np.int64)
        claimed = np.zeros(idx.shape[0], dtype=bool)
        for _ in range(quota):
            for j in order.permutation:
                col = by_center[:, j]
                pos = cursors[j]
                while claimed[col[pos]]:
                    pos += 1
                target = col[pos]
                cursors[j] = pos + 1
                claimed[target] = True
                new_assign[idx[target]] = j

    unplaced = new_assign < 0
    new_assign[unplaced] = prior[unplaced]

    centers = np.array(instance.centers, copy=True)
    for j in range(k):
        members = dataset.points[new_assign == j]
        if members.shape[0]:
            centers[j] = members.mean(axis=0) if instance.p == 2 else np.median(members, axis=0)
    return Clustering(centers=centers, assignment=new_assign)


def frac_oe(
    dataset: Dataset,
    spec: FairnessSpec,
    config: LloydConfig,
    order_seed: int | None = None,
) -> FairClusteringResult:
    """Post-processing solver: vanilla clustering, then one correction.

    Runs run_lloyd; if the quota check already passes, the vanilla result is
    returned unchanged. Otherwise one round-robin fair assignment runs against
    the converged centers and its cost is appended to the trace. order_seed
    defaults to a stream derived from config.seed.
    """
    vanilla = run_lloyd(dataset, config)
    ok, _ = check_tau_ratio(dataset, vanilla.clustering.assignment, spec)
    if ok:
        report = compute_report(dataset, vanilla.clustering, spec, config.p)
        return FairClusteringResult(
            clustering=vanilla.clustering,
            trace=vanilla.trace,
            report=report,
            corrected=False,
            converged=vanilla.converged,
        )
    rng = order_stream(config.seed if order_seed is None else order_seed)
    order = RoundRobinOrder.from_rng(spec.k, rng)
    instance = AssignmentInstance(dataset, vanilla.clustering.centers, spec, config.p)
    corrected = fair_assignment(instance, vanilla.clustering.assignment, order)
    cost, _ = objective_cost(dataset, corrected, config.p)
    report = compute_report(dataset, corrected, spec, config.p)
    return FairClusteringResult(
        clustering=corrected,
        trace=vanilla.trace + (cost,),
        report=report,
        corrected=True,
        converged=vanilla.converged,
    )


def frac(
    dataset: Dataset,
    spec: FairnessSpec,
    config: LloydConfig,
    order_seed: int | None = None,
) -> FairClusteringResult:
    """In-processing solver: fair assignment inside every iteration.

    Starts from random centers; each iteration assigns nearest, then runs the
    round-robin correction (which recomputes centers). The claim order is
    drawn once per run and held fixed across iterations, so each run is a
    deterministic map of the centers; cost is nearly order-insensitive
    anyway. The loop stops when the post-correction L_p cost settles under
    the vanilla rel_tol/max_iters contract, or when the center state revisits
    an earlier iterate — a revisit proves the deterministic dynamics have
    closed a cycle and will repeat forever, so the solver terminates and
    returns the lowest-cost iterate visited. The trace is not guaranteed
    monotone. Every iterate satisfies the quota check.
    """
    centers = initialize_centers(dataset, config)
    rng = order_stream(config.seed if order_seed is None else order_seed)
    order = RoundRobinOrder.from_rng(spec.k, rng)
    trace: list[float] = []
    prev_cost = None
    converged = False
    cycled = False
    clustering = None
    best_clustering = None
    best_cost = math.inf
    seen: set[bytes] = set()
    for _ in range(config.max_iters):
        key = centers.tobytes()
        if key in seen:
            converged = True
            cycled = True
            break
        seen.add(key)
        nearest = assign_nearest(dataset, centers, config.p)
        instance = AssignmentInstance(dataset, centers, spec, config.p)
        clustering = fair_assignment(instance, nearest, order)
        centers = clustering.centers
        cost, _ = objective_cost(dataset, clustering, config.p)
        trace.append(cost)
        if cost < best_cost:
            best_cost = cost
            best_clustering = clustering
        if prev_cost is not None and _relative_change(prev_cost, cost) < config.rel_tol:
            converged = True
            break
        prev_cost = cost
    if cycled:
        clustering = best_clustering
    report = compute_report(dataset, clustering, spec, config.p)
    return FairClusteringResult(
        clustering=clustering,
        trace=tuple(trace),
        report=report,
        corrected=True,
        converged=converged,
    )
