"""Diffusion-maps embedding from a squared-distance matrix, plus spectral bipartition."""

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .errors import DegenerateInputError
from .linalg import sym_evd

_TRIVIAL_EIGENVALUE_TOL = 1e-9


@dataclass(frozen=True)
class Embedding:
    """Low-dimensional diffusion coordinates.

    Column j of ``coordinates`` is the j-th nontrivial eigenvector of the
    diffusion operator scaled by its eigenvalue; the trivial eigenvalue 1
    and its constant eigenvector are excluded. ``disconnected`` is set when
    the affinity graph numerically splits into several components.
    """

    coordinates: NDArray
    eigenvalues: NDArray
    kernel_scale: float
    disconnected: bool = False

    @property
    def n_samples(self) -> int:
        return self.coordinates.shape[0]


def gaussian_affinity(dist2: NDArray, eps: float) -> NDArray:
    """Gaussian kernel ``exp(-d^2 / eps)`` on a squared-distance matrix."""
    dist2 = np.asarray(dist2, dtype=float)
    if eps <= 0.0:
        raise ValueError(f"kernel scale must be positive, got {eps}")
    _check_dist2(dist2)
    return np.exp(-dist2 / eps)


def _check_dist2(dist2: NDArray) -> None:
    if dist2.ndim != 2 or dist2.shape[0] != dist2.shape[1]:
        raise ValueError("squared-distance matrix must be square")
    if np.any(dist2 < 0.0):
        raise ValueError("squared distances must be nonnegative")
    if np.abs(np.diag(dist2)).max(initial=0.0) != 0.0:
        raise ValueError("squared-distance matrix must have a zero diagonal")
    scale = max(dist2.max(initial=0.0), 1.0)
    if np.abs(dist2 - dist2.T).max() > 1e-9 * scale:
        raise ValueError("squared-distance matrix must be symmetric")


def median_scale(dist2: NDArray, multiplier: float = 1.0) -> float:
    """Kernel scale set to ``multiplier`` times the median off-diagonal entry."""
    dist2 = np.asarray(dist2, dtype=float)
    n = dist2.shape[0]
    if n < 2:
        raise ValueError("need at least two samples for a median scale")
    med = float(np.median(dist2[np.triu_indices(n, k=1)]))
    if med <= 0.0:
        raise DegenerateInputError(
            "median pairwise squared distance is zero"
        )
    return multiplier * med


def diffusion_map(affinity: NDArray, q: int,
                  kernel_scale: float = float("nan")) -> Embedding:
    """Diffusion-maps embedding from a symmetric affinity matrix.

    The row-stochastic operator ``P = S^{-1} W`` shares its spectrum with
    the symmetric conjugate ``S^{-1/2} W S^{-1/2}``, which is what gets
    decomposed; eigenvectors are mapped back through ``S^{-1/2}``. The top
    ``q`` nontrivial eigenpairs form the embedding, each coordinate scaled
    by its eigenvalue.
    """
    w = np.asarray(affinity, dtype=float)
    n = w.shape[0]
    if w.ndim != 2 or w.shape[1] != n:
        raise ValueError("affinity must be a square matrix")
    if np.any(w < 0.0) or not np.all(np.isfinite(w)):
        raise ValueError("affinity entries must be finite and nonnegative")
    if not 1 <= q <= n - 1:
        raise ValueError(f"embedding dimension must be in [1, {n - 1}]")
    row_sums = w.sum(axis=1)
    if np.any(row_sums <= 0.0):
        raise DegenerateInputError("affinity has a row of all zeros")

    inv_sqrt = 1.0 / np.sqrt(row_sums)
    conjugate = w * inv_sqrt[:, None] * inv_sqrt[None, :]
    evd = sym_evd(conjugate)

    phis = evd.eigenvectors * inv_sqrt[:, None]
    norms = np.linalg.norm(phis, axis=0)
    phis = phis / norms[np.newaxis, :]
    lams = np.minimum(evd.eigenvalues, 1.0)

    near_one = np.sum(evd.eigenvalues > 1.0 - _TRIVIAL_EIGENVALUE_TOL)
    # The trivial pair is the top one; when the graph is connected its
    # eigenvector is strictly one-signed. Multiplicity at 1 or a sign
    # change both indicate a (numerically) disconnected graph.
    top = phis[:, 0]
    one_signed = bool(np.all(top >= -1e-12) or np.all(top <= 1e-12))
    disconnected = bool(near_one > 1) or not one_signed
    coords = phis[:, 1:q + 1] * lams[1:q + 1][np.newaxis, :]
    return Embedding(
        coordinates=coords,
        eigenvalues=lams[1:q + 1].copy(),
        kernel_scale=float(kernel_scale),
        disconnected=disconnected,
    )


def embed_distances(dist2: NDArray, q: int = 2,
                    multiplier: float = 1.0) -> Embedding:
    """Convenience pipeline: median kernel scale, Gaussian affinity, embedding."""
    eps = median_scale(dist2, multiplier=multiplier)
    return diffusion_map(gaussian_affinity(dist2, eps), q, kernel_scale=eps)


def spectral_bipartition(embedding: Embedding) -> NDArray:
    """Two-way split by the sign of the leading embedding coordinate.

    Samples with a nonnegative first coordinate get label 1, the rest
    label 0. The labels are only meaningful up to swapping, matching the
    sign ambiguity of eigenvectors.
    """
    if embedding.coordinates.shape[1] < 1:
        raise ValueError("embedding has no coordinates")
    return (embedding.coordinates[:, 0] >= 0.0).astype(int)


def bipartition_accuracy(labels: NDArray, truth: NDArray) -> float:
    """Agreement of a two-way split with reference labels, up to swapping."""
    labels = np.asarray(labels)
    truth = np.asarray(truth)
    if labels.shape != truth.shape:
        raise ValueError("label arrays must have matching shapes")
    agree = float(np.mean(labels == truth))
    return max(agree, 1.0 - agree)
