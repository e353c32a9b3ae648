"""Lloyd's K-means with random-partition initialization.

The loop is the textbook one: randomly assign every row to one of ``k``
groups, take group means as centroids, move each row to its nearest centroid,
recompute the means, and repeat until no row moves. Distances are squared
Euclidean on raw count vectors; ties go to the lowest cluster id.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DimensionMismatch, EmptyMatrix, KTooLarge
from .featurizer import FeatureMatrix, as_dense, as_dense_row
from .seeding import check_seed, rng_for


@dataclass(frozen=True)
class KMeansConfig:
    k: int = 2
    seed: int = 0
    max_iterations: int = 100
    normalize_rows: bool = False

    def __post_init__(self):
        if self.k < 1:
            raise ConfigError(f"k must be >= 1, got {self.k}")
        if self.max_iterations < 1:
            raise ConfigError(f"max_iterations must be >= 1, got {self.max_iterations}")
        check_seed(self.seed)


@dataclass(frozen=True, eq=False)
class KMeansModel:
    centroids: np.ndarray        # (k, n_cols)
    assignments: np.ndarray      # (n_rows,) cluster ids of the fitted rows
    objective: float
    iterations_run: int
    converged: bool
    objective_history: tuple[float, ...]
    normalize_rows: bool = False

    @property
    def k(self) -> int:
        return self.centroids.shape[0]

    @property
    def n_cols(self) -> int:
        return self.centroids.shape[1]

    def cluster_sizes(self) -> list[int]:
        return np.bincount(self.assignments, minlength=self.k).tolist()

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "centroids": self.centroids.tolist(),
            "objective": self.objective,
            "iterations_run": self.iterations_run,
        }


def _normalized(X: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(X, axis=1, keepdims=True)
    return np.divide(X, norms, out=np.zeros_like(X), where=norms > 0)


def squared_distances(X: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    """(n, k) matrix of squared Euclidean distances, summed coordinate-wise."""
    diff = X[:, None, :] - centroids[None, :, :]
    return np.einsum("ikd,ikd->ik", diff, diff)


def cluster_means(X: np.ndarray, assignments: np.ndarray, k: int) -> np.ndarray:
    centroids = np.zeros((k, X.shape[1]))
    for j in range(k):
        members = X[assignments == j]
        if len(members):
            centroids[j] = members.mean(axis=0)
    return centroids


def kmeans_objective(matrix, centroids, assignments) -> float:
    """Sum over clusters of squared distances from members to their centroid."""
    X = as_dense(matrix)
    C = np.atleast_2d(np.asarray(centroids, dtype=np.float64))
    a = np.asarray(assignments)
    if C.shape[1] != X.shape[1]:
        raise DimensionMismatch(f"centroids have {C.shape[1]} columns, matrix has {X.shape[1]}")
    if a.shape != (X.shape[0],):
        raise DimensionMismatch(f"{a.size} assignments for {X.shape[0]} rows")
    if a.size and (a.min() < 0 or a.max() >= C.shape[0]):
        raise DimensionMismatch("assignment refers to a missing centroid")
    diff = X - C[a]
    return float(np.sum(diff * diff))


def _repair_empty(assignments: np.ndarray, dist: np.ndarray, k: int) -> None:
    """Give every empty cluster the row farthest from its own centroid, in place."""
    for j in range(k):
        if np.any(assignments == j):
            continue
        sizes = np.bincount(assignments, minlength=k)
        own = dist[np.arange(len(assignments)), assignments]
        own = np.where(sizes[assignments] > 1, own, -np.inf)
        assignments[int(np.argmax(own))] = j


def lloyd_step(X: np.ndarray, centroids: np.ndarray, assignments: np.ndarray):
    """One reassign + recompute round. Returns (assignments, centroids, changed)."""
    k = centroids.shape[0]
    dist = squared_distances(X, centroids)
    new = np.argmin(dist, axis=1)
    _repair_empty(new, dist, k)
    changed = bool(np.any(new != assignments))
    return new, cluster_means(X, new, k), changed


def kmeans_fit(matrix: FeatureMatrix | np.ndarray, config: KMeansConfig = KMeansConfig()) -> KMeansModel:
    X = as_dense(matrix)
    n = X.shape[0]
    if n == 0 or X.shape[1] == 0:
        raise EmptyMatrix(f"cannot cluster a matrix of shape {X.shape}")
    if config.k > n:
        raise KTooLarge(f"k={config.k} exceeds the {n} rows available")
    if config.normalize_rows:
        X = _normalized(X)
    k = config.k

    rng = rng_for(config.seed)
    order = rng.permutation(n)
    assignments = np.empty(n, dtype=np.intp)
    # first k permuted rows seed one group each so no group starts empty
    assignments[order[:k]] = np.arange(k)
    assignments[order[k:]] = rng.integers(0, k, size=n - k)
    centroids = cluster_means(X, assignments, k)
    history = [kmeans_objective(X, centroids, assignments)]

    converged = False
    iterations = 0
    while iterations < config.max_iterations:
        iterations += 1
        assignments, centroids, changed = lloyd_step(X, centroids, assignments)
        history.append(kmeans_objective(X, centroids, assignments))
        if not changed:
            converged = True
            break

    return KMeansModel(
        centroids=centroids,
        assignments=assignments,
        objective=history[-1],
        iterations_run=iterations,
        converged=converged,
        objective_history=tuple(history),
        normalize_rows=config.normalize_rows,
    )


def assign_rows(model: KMeansModel, matrix) -> np.ndarray:
    X = as_dense(matrix)
    if X.shape[1] != model.n_cols:
        raise DimensionMismatch(f"matrix has {X.shape[1]} columns, centroids have {model.n_cols}")
    if model.normalize_rows:
        X = _normalized(X)
    return np.argmin(squared_distances(X, model.centroids), axis=1)


def assign_nearest(model: KMeansModel, row) -> int:
    """Cluster id of the centroid nearest to ``row`` (lowest id on ties)."""
    x = as_dense_row(row, model.n_cols)
    return int(assign_rows(model, x[None, :])[0])
