"""Global and local Mahalanobis distances, plain and cluster-informed.

A global model whitens samples with one pseudo-inverse covariance built
from principal directions; a local model holds one such factor per sample,
estimated from its nearest-neighbor patch. In informed mode the directions
are constrained to the span of a row-cluster indicator before inversion.
"""

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .clustering import IndicatorMatrix, indicator_matrix, kmeans
from .errors import RankDeficiencyError
from .linalg import sample_covariance
from .pca import PrincipalBasis, constrained_pca, pca_top_k


@dataclass(frozen=True)
class GlobalMetricModel:
    """Squared Mahalanobis distance ``||W^T c1 - W^T c2||^2`` with one factor W."""

    basis: PrincipalBasis
    factor: NDArray
    provenance: str  # "plain" | "informed"

    @property
    def dim(self) -> int:
        return self.factor.shape[0]


@dataclass(frozen=True)
class LocalMetricModel:
    """Per-sample whitening factors for the local Mahalanobis distance."""

    factors: NDArray            # (n, m, d)
    neighbor_indices: NDArray   # (n, N), self first
    n_neighbors: int
    rank: int
    provenance: str

    @property
    def n_samples(self) -> int:
        return self.factors.shape[0]


def _factor_from_basis(basis: PrincipalBasis) -> NDArray:
    return basis.directions / np.sqrt(basis.eigenvalues)[np.newaxis, :]


def global_model_from_covariance(sigma: NDArray, k: int,
                                 indicator: IndicatorMatrix | None = None,
                                 grad_tol: float | None = None,
                                 max_iters: int = 200,
                                 step_rule: str = "backtracking",
                                 ) -> GlobalMetricModel:
    """Build a global metric directly from a covariance estimate.

    With an ``indicator`` the principal directions are constrained to its
    span (informed mode); otherwise they are the plain top-``k``
    eigenvectors.
    """
    basis = pca_top_k(sigma, k)
    provenance = "plain"
    if indicator is not None:
        basis = constrained_pca(sigma, indicator, k, init=basis,
                                grad_tol=grad_tol, max_iters=max_iters,
                                step_rule=step_rule)
        provenance = "informed"
    return GlobalMetricModel(basis=basis, factor=_factor_from_basis(basis),
                             provenance=provenance)


def fit_global(data: NDArray, k: int, informed: bool = False,
               center: bool = True, n_row_clusters: int | None = None,
               seed=None, restarts: int = 20, grad_tol: float | None = None,
               max_iters: int = 200, step_rule: str = "backtracking",
               ) -> GlobalMetricModel:
    """Fit a global Mahalanobis model to the columns of ``data``.

    Plain mode takes the top-``k`` principal directions of the sample
    covariance. Informed mode first clusters the rows of ``data`` into
    ``n_row_clusters`` groups (default ``k + 1``) and constrains the
    directions to the cluster indicator span; the eigenvalue weights are
    the plain PCA variances either way.
    """
    data = np.asarray(data, dtype=float)
    sigma = sample_covariance(data, center=center)
    if not informed:
        return global_model_from_covariance(sigma, k)
    if n_row_clusters is None:
        n_row_clusters = k + 1
    assignment = kmeans(data, n_row_clusters, seed=seed, restarts=restarts)
    indicator = indicator_matrix(assignment)
    return global_model_from_covariance(sigma, k, indicator=indicator,
                                        grad_tol=grad_tol,
                                        max_iters=max_iters,
                                        step_rule=step_rule)


def global_distance(model: GlobalMetricModel, c1: NDArray,
                    c2: NDArray) -> float:
    """Squared Mahalanobis distance between two samples."""
    c1 = np.asarray(c1, dtype=float)
    c2 = np.asarray(c2, dtype=float)
    if c1.shape != (model.dim,) or c2.shape != (model.dim,):
        raise ValueError(
            f"samples must be vectors of length {model.dim}"
        )
    z = model.factor.T @ (c1 - c2)
    return float(z @ z)


def nearest_neighbor_indices(data: NDArray, n_neighbors: int) -> NDArray:
    """Indices of the Euclidean nearest columns for every column.

    Each row lists ``n_neighbors`` column indices sorted by distance; a
    column is always its own nearest neighbor, so it appears first.
    """
    data = np.asarray(data, dtype=float)
    n = data.shape[1]
    if not 1 <= n_neighbors <= n:
        raise ValueError(
            f"n_neighbors must be in [1, {n}], got {n_neighbors}"
        )
    sq = np.einsum("ij,ij->j", data, data)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (data.T @ data)
    np.fill_diagonal(d2, -1.0)  # self strictly first even among duplicates
    order = np.argsort(d2, axis=1, kind="stable")
    return order[:, :n_neighbors]


def fit_local(data: NDArray, n_neighbors: int, rank: int,
              informed: bool = False, n_row_clusters: int | None = None,
              seed=None, restarts: int = 5, grad_tol: float | None = None,
              max_iters: int = 100, step_rule: str = "backtracking",
              ) -> LocalMetricModel:
    """Fit a local Mahalanobis model: one covariance patch per column.

    For each column, its ``n_neighbors`` nearest columns (itself included)
    are centered and their covariance reduced to the top-``rank``
    directions. Informed mode additionally clusters the rows of every
    neighborhood matrix into ``n_row_clusters`` groups (default
    ``rank + 1``) and constrains the local directions to that indicator
    span.
    """
    data = np.asarray(data, dtype=float)
    m, n = data.shape
    if rank > min(m, n_neighbors - 1):
        raise ValueError(
            f"rank {rank} exceeds what {n_neighbors} neighbors in "
            f"dimension {m} can support"
        )
    if informed and n_row_clusters is None:
        n_row_clusters = rank + 1
    neighbors = nearest_neighbor_indices(data, n_neighbors)
    seeds = np.random.SeedSequence(seed).spawn(n)
    factors = np.empty((n, m, rank))
    for i in range(n):
        patch = data[:, neighbors[i]]
        sigma = sample_covariance(patch, center=True)
        try:
            basis = pca_top_k(sigma, rank)
        except RankDeficiencyError as exc:
            raise RankDeficiencyError(
                f"neighborhood of column {i}: {exc}",
                attainable_rank=exc.attainable_rank,
            ) from exc
        if informed:
            assignment = kmeans(patch, n_row_clusters, seed=seeds[i],
                                restarts=restarts)
            basis = constrained_pca(sigma, indicator_matrix(assignment),
                                    rank, init=basis, grad_tol=grad_tol,
                                    max_iters=max_iters, step_rule=step_rule)
        factors[i] = _factor_from_basis(basis)
    return LocalMetricModel(
        factors=factors,
        neighbor_indices=neighbors,
        n_neighbors=n_neighbors,
        rank=rank,
        provenance="informed" if informed else "plain",
    )


def local_distance(model: LocalMetricModel, i: int, j: int,
                   data: NDArray) -> float:
    """Squared local Mahalanobis distance between columns ``i`` and ``j``.

    Averages the two endpoint quadratic forms:
    ``(d_i^2 + d_j^2) / 2`` where ``d_i`` whitens the difference with the
    factor of sample ``i``.
    """
    n = model.n_samples
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"indices ({i}, {j}) out of range for n={n}")
    diff = np.asarray(data, dtype=float)[:, i] - np.asarray(data, dtype=float)[:, j]
    zi = model.factors[i].T @ diff
    zj = model.factors[j].T @ diff
    return float(0.5 * (zi @ zi + zj @ zj))


def distance_matrix(model, data: NDArray) -> NDArray:
    """All-pairs squared distance matrix for the columns of ``data``.

    Symmetric with an exactly zero diagonal; accepts either a global or a
    local model fitted on matching dimensions.
    """
    data = np.asarray(data, dtype=float)
    if isinstance(model, GlobalMetricModel):
        z = model.factor.T @ data
        sq = np.einsum("ij,ij->j", z, z)
        d2 = sq[:, None] + sq[None, :] - 2.0 * (z.T @ z)
    elif isinstance(model, LocalMetricModel):
        n = data.shape[1]
        if model.n_samples != n:
            raise ValueError(
                f"model was fitted on {model.n_samples} samples, got {n}"
            )
        d2 = np.empty((n, n))
        for i in range(n):
            z = model.factors[i].T @ data          # (d, n)
            diff = z[:, i:i + 1] - z
            d2[i] = np.einsum("ij,ij->j", diff, diff)
        # The averaging over the two endpoint forms happens in the
        # symmetrization below: (E + E^T) / 2.
    else:
        raise TypeError(f"unsupported model type: {type(model).__name__}")
    d2 = 0.5 * (d2 + d2.T)
    np.maximum(d2, 0.0, out=d2)
    np.fill_diagonal(d2, 0.0)
    return d2
