"""k-means over matrix rows, the orthonormal cluster indicator, and the gap statistic."""

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .errors import DegenerateInputError


@dataclass(frozen=True)
class ClusterAssignment:
    """Result of a k-means run: labels, cluster sizes, centroids and final cost."""

    labels: NDArray
    sizes: NDArray
    centroids: NDArray
    cost: float


@dataclass(frozen=True)
class IndicatorMatrix:
    """Orthonormal cluster indicator.

    Column k holds ``1/sqrt(m_k)`` on the rows of cluster k and zero
    elsewhere, so ``H^T H = I`` and ``H H^T`` averages any vector within
    each cluster.
    """

    matrix: NDArray
    sizes: NDArray

    @property
    def n_clusters(self) -> int:
        return self.matrix.shape[1]

    def project(self, vectors: NDArray) -> NDArray:
        """Apply ``H H^T`` to a vector or a matrix of column vectors."""
        h = self.matrix
        return h @ (h.T @ vectors)


def _squared_distances(points: NDArray, centroids: NDArray) -> NDArray:
    """Pairwise squared Euclidean distances, shape (n_points, n_centroids)."""
    p2 = np.einsum("ij,ij->i", points, points)
    c2 = np.einsum("ij,ij->i", centroids, centroids)
    d2 = p2[:, None] + c2[None, :] - 2.0 * (points @ centroids.T)
    np.maximum(d2, 0.0, out=d2)
    return d2


def _kmeanspp_init(points: NDArray, n_clusters: int, rng) -> NDArray:
    """k-means++ seeding: spread initial centroids proportionally to D^2."""
    n = points.shape[0]
    centroids = np.empty((n_clusters, points.shape[1]))
    first = rng.integers(n)
    centroids[0] = points[first]
    closest = _squared_distances(points, centroids[:1])[:, 0]
    for k in range(1, n_clusters):
        total = closest.sum()
        if total <= 0.0:
            # All remaining points coincide with a chosen centroid.
            idx = rng.integers(n)
        else:
            idx = rng.choice(n, p=closest / total)
        centroids[k] = points[idx]
        d_new = _squared_distances(points, centroids[k:k + 1])[:, 0]
        np.minimum(closest, d_new, out=closest)
    return centroids


def _lloyd(points: NDArray, centroids: NDArray, max_iters: int):
    """Lloyd iterations from the given centroids; cost must never increase."""
    n, _ = points.shape
    n_clusters = centroids.shape[0]
    labels = np.full(n, -1, dtype=int)
    prev_cost = np.inf
    for _ in range(max_iters):
        d2 = _squared_distances(points, centroids)
        new_labels = np.argmin(d2, axis=1)
        cost = float(d2[np.arange(n), new_labels].sum())
        # Non-increasing up to round-off in the distance evaluations.
        assert cost <= prev_cost * (1.0 + 1e-9) + 1e-12, \
            "k-means cost increased across an iteration"
        converged = np.array_equal(new_labels, labels)
        labels = new_labels
        prev_cost = cost
        if converged:
            break
        counts = np.bincount(labels, minlength=n_clusters)
        if np.all(counts > 0):
            sums = np.zeros_like(centroids)
            np.add.at(sums, labels, points)
            centroids = sums / counts[:, None]
        else:
            for k in range(n_clusters):
                members = labels == k
                if members.any():
                    centroids[k] = points[members].mean(axis=0)
                else:
                    # Re-seed an emptied cluster at the point farthest from
                    # its current centroid so every cluster stays populated.
                    d2 = _squared_distances(points, centroids)
                    assigned = d2[np.arange(n), labels]
                    idx = int(np.argmax(assigned))
                    centroids[k] = points[idx]
                    labels[idx] = k
    d2 = _squared_distances(points, centroids)
    labels = np.argmin(d2, axis=1)
    # A cluster repaired late can still come out empty of the final argmin;
    # force its farthest point onto it so all clusters are populated.
    counts = np.bincount(labels, minlength=n_clusters)
    if np.any(counts == 0):
        for k in range(n_clusters):
            if not np.any(labels == k):
                assigned = d2[np.arange(n), labels]
                idx = int(np.argmax(assigned))
                centroids[k] = points[idx]
                labels[idx] = k
                d2 = _squared_distances(points, centroids)
    cost = float(d2[np.arange(n), labels].sum())
    return labels, centroids, cost


def kmeans(points: NDArray, n_clusters: int, seed=None, restarts: int = 20,
           max_iters: int = 300) -> ClusterAssignment:
    """Cluster the rows of ``points`` into ``n_clusters`` groups.

    Runs Lloyd's algorithm from k-means++ seedings and keeps the best of
    ``restarts`` runs by cost. Deterministic for a fixed ``seed``. Emptied
    clusters are repaired by moving their centroid to the point currently
    farthest from its own centroid, so the result always has
    ``n_clusters`` non-empty clusters.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 2:
        raise ValueError("points must be a 2-D array (one row per sample)")
    n = points.shape[0]
    if n_clusters < 1 or n_clusters > n:
        raise ValueError(
            f"n_clusters must be in [1, {n}], got {n_clusters}"
        )
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(restarts):
        centroids = _kmeanspp_init(points, n_clusters, rng)
        labels, centroids, cost = _lloyd(points, centroids, max_iters)
        if best is None or cost < best[2]:
            best = (labels, centroids, cost)
    labels, centroids, cost = best
    sizes = np.bincount(labels, minlength=n_clusters)
    return ClusterAssignment(labels=labels, sizes=sizes,
                             centroids=centroids, cost=cost)


def indicator_matrix(assignment: ClusterAssignment) -> IndicatorMatrix:
    """Build the orthonormal indicator for a cluster assignment."""
    labels = assignment.labels
    sizes = assignment.sizes
    if np.any(sizes == 0):
        raise ValueError("every cluster must be non-empty")
    m = labels.shape[0]
    k = sizes.shape[0]
    h = np.zeros((m, k))
    h[np.arange(m), labels] = 1.0 / np.sqrt(sizes[labels])
    return IndicatorMatrix(matrix=h, sizes=sizes.copy())


def indicator_from_labels(labels: NDArray) -> IndicatorMatrix:
    """Indicator built directly from integer labels (e.g. a known partition)."""
    labels = np.asarray(labels)
    uniq, dense = np.unique(labels, return_inverse=True)
    sizes = np.bincount(dense, minlength=uniq.size)
    m = labels.shape[0]
    h = np.zeros((m, uniq.size))
    h[np.arange(m), dense] = 1.0 / np.sqrt(sizes[dense])
    return IndicatorMatrix(matrix=h, sizes=sizes)


def gap_statistic(points: NDArray, n_clusters: int, seed=None,
                  n_refs: int = 10, restarts: int = 5,
                  max_iters: int = 300) -> float:
    """Gap statistic of a clustering: reference dispersion minus data dispersion.

    Computes ``E[log W_K]`` over ``n_refs`` datasets drawn uniformly inside
    the bounding box of ``points`` and subtracts ``log W_K`` of the data,
    where ``W_K`` is the pooled within-cluster squared dispersion (the
    k-means cost). Larger values mean the data is more clusterable than a
    structureless reference.
    """
    points = np.asarray(points, dtype=float)
    if n_refs < 5:
        raise ValueError("n_refs must be >= 5")
    lows = points.min(axis=0)
    highs = points.max(axis=0)
    spans = highs - lows
    if np.all(spans == 0.0):
        raise DegenerateInputError("points have a zero bounding box")
    rng = np.random.default_rng(seed)
    data_cost = kmeans(points, n_clusters, seed=rng.integers(2**63),
                       restarts=restarts, max_iters=max_iters).cost
    if data_cost <= 0.0:
        raise DegenerateInputError(
            "within-cluster dispersion of the data is zero"
        )
    ref_logs = np.empty(n_refs)
    for r in range(n_refs):
        ref = lows + spans * rng.random(points.shape)
        ref_cost = kmeans(ref, n_clusters, seed=rng.integers(2**63),
                          restarts=restarts, max_iters=max_iters).cost
        ref_logs[r] = np.log(ref_cost)
    return float(ref_logs.mean() - np.log(data_cost))
