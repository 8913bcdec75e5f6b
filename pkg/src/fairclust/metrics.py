"""Evaluation metrics: objective cost, balance, fairness error, share checks.

All functions are pure and operate on any (dataset, clustering, spec) triple,
regardless of which algorithm produced the clustering.
"""
from __future__ import annotations

import numpy as np

from .core import Clustering, Dataset, FairnessSpec, MetricsReport, cluster_group_counts
from .exceptions import SingleGroup

# Achieved proportions are clamped here before the log so that an empty
# (cluster, group) cell yields a large finite penalty instead of +inf.
FAIRNESS_ERROR_CLAMP = 1e-12


def squared_distances(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """(n, k) matrix of squared Euclidean distances."""
    diff = points[:, None, :] - centers[None, :, :]
    return np.einsum("nkd,nkd->nk", diff, diff)


def objective_cost(dataset: Dataset, clustering: Clustering, p: int) -> tuple[float, float]:
    """Return (L_p, raw_sum) of the assignment against its centers.

    raw_sum is sum_i d(x_i, c_phi(i))^p with Euclidean d; L_p = raw_sum^(1/p).
    """
    if p not in (1, 2):
        raise ValueError(f"p must be 1 or 2, got {p}")
    diff = dataset.points - clustering.centers[clustering.assignment]
    sq = np.einsum("nd,nd->n", diff, diff)
    raw = float(np.sum(sq) if p == 2 else np.sum(np.sqrt(sq)))
    return raw ** (1.0 / p), raw


def balance(dataset: Dataset, clustering: Clustering) -> float:
    """Minimum over clusters and ordered group pairs of count_a / count_b.

    Equals min_j (min_l count / max_l count). By convention a cluster missing
    any group entirely gives 0 (the zero-numerator pair dominates; the
    reciprocal a/0 pair is treated as excluded).
    """
    if dataset.m < 2:
        raise SingleGroup("balance needs at least two groups")
    counts = cluster_group_counts(dataset, clustering.assignment, clustering.k)
    lo = counts.min(axis=1)
    if np.any(lo == 0):
        return 0.0
    return float(np.min(lo / counts.max(axis=1)))


def fairness_error(dataset: Dataset, clustering: Clustering, target_tau) -> float:
    """KL-divergence-style gap between target and achieved group proportions.

    FE = sum over clusters j and groups l of -tau_l * ln(q_jl / tau_l) with
    q_jl = (group-l count in cluster j) / n_l, natural log, q clamped at
    FAIRNESS_ERROR_CLAMP; groups with tau_l = 0 contribute nothing.
    """
    tau = np.asarray(target_tau, dtype=np.float64)
    counts = cluster_group_counts(dataset, clustering.assignment, clustering.k)
    q = np.maximum(counts / dataset.group_counts, FAIRNESS_ERROR_CLAMP)
    active = tau > 0.0
    if not np.any(active):
        return 0.0
    terms = -tau[active] * np.log(q[:, active] / tau[active])
    return float(np.sum(terms))


def mp_rd_check(dataset: Dataset, clustering: Clustering, tau_mp, tau_rd) -> tuple[bool, bool]:
    """Share-of-cluster-size checks, measured (never enforced by the solvers).

    MP holds iff every cluster j has count_jl >= tau_mp[l] * |cluster j| for
    all groups l; RD holds iff count_jl <= tau_rd[l] * |cluster j|.
    """
    counts = cluster_group_counts(dataset, clustering.assignment, clustering.k)
    sizes = counts.sum(axis=1, keepdims=True)
    mp = np.asarray(tau_mp, dtype=np.float64)
    rd = np.asarray(tau_rd, dtype=np.float64)
    mp_ok = bool(np.all(counts >= mp[None, :] * sizes))
    rd_ok = bool(np.all(counts <= rd[None, :] * sizes))
    return mp_ok, rd_ok


def balance_lower_bound(spec: FairnessSpec, dataset: Dataset, a: int, b: int) -> float:
    """Guaranteed per-cluster count_a / count_b for any quota-fair assignment.

    Every cluster receives at least quota_a group-a points, and at most
    n_b - (k-1) * quota_b group-b points (its own quota plus everything the
    round-robin left over). With integral tau*n this equals
    tau_a * n_a / (n_b * (1 - k*tau_b + tau_b)).
    """
    if dataset.m < 2:
        raise SingleGroup("bound needs at least two groups")
    n_b = int(dataset.group_counts[b])
    ceiling = n_b - (spec.k - 1) * int(spec.quotas[b])
    return float(spec.quotas[a]) / float(ceiling)


def compute_report(
    dataset: Dataset,
    clustering: Clustering,
    spec: FairnessSpec,
    p: int,
    tau_mp=None,
    tau_rd=None,
) -> MetricsReport:
    """Assemble the full metrics bundle for one clustering.

    tau_mp defaults to spec.tau; tau_rd defaults to all-ones (vacuous upper
    bound) — both are measured thresholds, not constraints. Single-group
    datasets report balance 1.0 (no pair to compare) and are never flagged
    degenerate.
    """
    from .fair_assignment import check_tau_ratio  # local: avoid import cycle

    l_cost, raw = objective_cost(dataset, clustering, p)
    if dataset.m >= 2:
        bal = balance(dataset, clustering)
        counts = cluster_group_counts(dataset, clustering.assignment, clustering.k)
        degenerate = bool(np.any(counts == 0))
    else:
        bal, degenerate = 1.0, False
    fe = fairness_error(dataset, clustering, spec.tau)
    ok, _ = check_tau_ratio(dataset, clustering.assignment, spec)
    mp_vec = spec.tau if tau_mp is None else tau_mp
    rd_vec = np.ones(dataset.m) if tau_rd is None else tau_rd
    mp_ok, rd_ok = mp_rd_check(dataset, clustering, mp_vec, rd_vec)
    return MetricsReport(
        objective_cost=l_cost,
        raw_cost_sum=raw,
        balance=bal,
        fairness_error=fe,
        tau_satisfied=ok,
        mp_satisfied=mp_ok,
        rd_satisfied=rd_ok,
        balance_degenerate=degenerate,
    )
