"""Prototype extraction: PAM k-medoids over a precomputed distance matrix.

Everything is deterministic given the seed: k-medoids++ seeding uses a
dedicated RNG stream, assignment ties go to the lowest medoid index, and the
swap search keeps the incumbent on ties.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin

from .distance import DistanceConfig, DistanceMatrix, check_distance_matrix, distance_matrix
from .errors import InvalidAssignment, InvalidK
from .model import Dataset


def kmedoids_pp_init(values: np.ndarray, k: int, seed: int) -> list[int]:
    """k-medoids++ seeding: next medoid ~ squared distance to nearest chosen."""
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    if not 1 <= k <= n:
        raise InvalidK(f"k={k} outside [1, {n}]")
    rng = random.Random(seed)
    chosen = [rng.randrange(n)]
    while len(chosen) < k:
        nearest_sq = np.min(values[:, chosen], axis=1) ** 2
        nearest_sq[chosen] = 0.0
        total = float(nearest_sq.sum())
        if total == 0.0:
            # all remaining points coincide with a chosen medoid
            remaining = [i for i in range(n) if i not in chosen]
            chosen.append(remaining[rng.randrange(len(remaining))])
            continue
        r = rng.random() * total
        acc = 0.0
        pick = n - 1
        for i in range(n):
            acc += nearest_sq[i]
            if r < acc:
                pick = i
                break
        chosen.append(pick)
    return chosen


def _assign(values: np.ndarray, medoids: Sequence[int]) -> np.ndarray:
    """Nearest-medoid assignment; ties broken by lowest medoid index."""
    med = np.asarray(medoids)
    by_index = np.argsort(med, kind="stable")
    # evaluate columns in medoid-index order so argmin ties pick the lowest index
    cols = values[:, med[by_index]]
    winner = np.argmin(cols, axis=1)
    return by_index[winner].astype(int)


def _objective(values: np.ndarray, medoids: Sequence[int], assignment: np.ndarray) -> float:
    med = np.asarray(medoids)
    return float(values[np.arange(values.shape[0]), med[assignment]].sum())


@dataclass(frozen=True)
class ClusteringResult:
    k: int
    medoid_indices: tuple[int, ...]
    assignment: tuple[int, ...]  # cluster id = position in medoid_indices
    objective: float
    silhouette: float
    seed: int

    def cluster_sizes(self) -> list[int]:
        sizes = [0] * self.k
        for c in self.assignment:
            sizes[c] += 1
        return sizes

    def to_jsonable(self) -> dict:
        return {
            "k": self.k,
            "medoid_indices": list(self.medoid_indices),
            "assignment": list(self.assignment),
            "objective": self.objective,
            "silhouette": self.silhouette,
            "seed": self.seed,
            "cluster_sizes": self.cluster_sizes(),
        }


class KMedoids(BaseEstimator, ClusterMixin):
    """PAM k-medoids on a precomputed distance matrix.

    Parameters
    ----------
    n_clusters : number of medoids.
    seed : RNG seed for the k-medoids++ initialization.
    """

    def __init__(self, n_clusters: int = 6, seed: int = 0):
        self.n_clusters = n_clusters
        self.seed = seed

    def fit(self, X, y=None):
        values = check_distance_matrix(X)
        n = values.shape[0]
        k = self.n_clusters
        if not 1 <= k <= n:
            raise InvalidK(f"k={k} outside [1, {n}]")
        medoids = kmedoids_pp_init(values, k, self.seed)
        assignment = _assign(values, medoids)
        objective = _objective(values, medoids, assignment)
        idx = np.arange(n)
        while True:
            # distance to nearest and second-nearest medoid, per point
            dmed = values[:, medoids]
            order = np.argsort(dmed, axis=1, kind="stable")
            nearest = dmed[idx, order[:, 0]]
            second = dmed[idx, order[:, 1]] if k > 1 else np.full(n, np.inf)
            nearest_pos = order[:, 0]
            best_delta = 0.0
            best_swap: Optional[tuple[int, int]] = None
            in_medoids = set(medoids)
            for mi in range(k):
                owned = nearest_pos == mi
                for x in range(n):
                    if x in in_medoids:
                        continue
                    dx = values[:, x]
                    new_cost = np.where(owned, np.minimum(dx, second), np.minimum(nearest, dx))
                    delta = float(new_cost.sum()) - objective
                    if delta < best_delta - 1e-12:
                        best_delta = delta
                        best_swap = (mi, x)
            if best_swap is None:
                break
            medoids[best_swap[0]] = best_swap[1]
            assignment = _assign(values, medoids)
            objective = _objective(values, medoids, assignment)
        self.medoid_indices_ = tuple(int(m) for m in medoids)
        self.labels_ = tuple(int(a) for a in assignment)
        self.objective_ = objective
        return self


def kmedoids(matrix: DistanceMatrix, k: int, seed: int) -> ClusteringResult:
    """Run PAM and score the result with the mean silhouette coefficient."""
    est = KMedoids(n_clusters=k, seed=seed).fit(matrix.values)
    sil = silhouette(matrix.values, est.labels_) if k >= 2 else 0.0
    return ClusteringResult(
        k=k,
        medoid_indices=est.medoid_indices_,
        assignment=est.labels_,
        objective=est.objective_,
        silhouette=sil,
        seed=seed,
    )


def silhouette(values: np.ndarray, assignment: Sequence[int]) -> float:
    """Mean silhouette coefficient; singleton clusters contribute 0."""
    values = np.asarray(values, dtype=float)
    assignment = np.asarray(assignment, dtype=int)
    n = values.shape[0]
    if assignment.shape[0] != n:
        raise InvalidAssignment("assignment length does not match matrix size")
    clusters = np.unique(assignment)
    if len(clusters) < 2:
        raise InvalidAssignment("silhouette needs at least two clusters")
    members = {c: np.flatnonzero(assignment == c) for c in clusters}
    scores = np.zeros(n)
    for i in range(n):
        own = members[assignment[i]]
        if len(own) == 1:
            scores[i] = 0.0
            continue
        a = values[i, own].sum() / (len(own) - 1)
        b = min(values[i, members[c]].mean() for c in clusters if c != assignment[i])
        denom = max(a, b)
        scores[i] = 0.0 if denom == 0 else (b - a) / denom
    return float(scores.mean())


@dataclass(frozen=True)
class SweepReport:
    """Silhouette grid over (distance config, k) with the underlying results."""

    config_labels: tuple[str, ...]
    ks: tuple[int, ...]
    silhouettes: tuple[tuple[float, ...], ...]  # rows = configs, cols = ks
    results: dict

    def result_for(self, config_label: str, k: int) -> ClusteringResult:
        return self.results[(config_label, k)]

    def to_jsonable(self) -> dict:
        return {
            "configs": list(self.config_labels),
            "ks": list(self.ks),
            "silhouettes": [list(row) for row in self.silhouettes],
        }

    def render_text(self) -> str:
        width = max(len(label) for label in self.config_labels) + 2
        header = " " * width + "".join(f"k={k:<8}" for k in self.ks)
        lines = [header]
        for label, row in zip(self.config_labels, self.silhouettes):
            cells = "".join(f"{v:<10.4f}" for v in row)
            lines.append(f"{label:<{width}}{cells}")
        return "\n".join(lines)


def sweep(
    dataset: Dataset,
    configs: Sequence[DistanceConfig],
    ks: Sequence[int],
    seed: int = 0,
) -> SweepReport:
    """Cluster the dataset for every (config, k) cell with a fixed seed policy."""
    if not configs or not ks:
        raise ValueError("sweep grid must be non-empty")
    labels = []
    grid = []
    results: dict = {}
    for config in configs:
        matrix = distance_matrix(dataset, config)
        label = config.label()
        labels.append(label)
        row = []
        for k in ks:
            result = kmedoids(matrix, k, seed)
            results[(label, k)] = result
            row.append(result.silhouette)
        grid.append(tuple(row))
    return SweepReport(
        config_labels=tuple(labels),
        ks=tuple(ks),
        silhouettes=tuple(grid),
        results=results,
    )
