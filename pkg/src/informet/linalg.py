"""Dense symmetric linear algebra: eigendecomposition, covariance, PSD pseudo-inverse.

Everything downstream (principal directions, metric models, embeddings) is
built on the three primitives here. All functions are pure and operate on
plain ``numpy`` arrays; returned containers are frozen dataclasses.
"""

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .errors import InsufficientSamplesError, RankDeficiencyError

# Relative eigenvalue floor: anything below floor * lambda_max counts as zero
# when ranks are inferred rather than requested.
DEFAULT_EIGENVALUE_FLOOR = 1e-12

_SYMMETRY_TOL = 1e-9
_NEGATIVE_CLIP = 1e-9


@dataclass(frozen=True)
class SymmetricEVD:
    """Eigendecomposition of a symmetric matrix, eigenvalues descending.

    ``eigenvectors`` holds orthonormal columns ordered to match
    ``eigenvalues``; each column's largest-magnitude entry is positive so
    repeated runs produce identical output.
    """

    eigenvalues: NDArray
    eigenvectors: NDArray


@dataclass(frozen=True)
class PsdPseudoInverse:
    """Pseudo-inverse of a PSD matrix in factored form.

    The pseudo-inverse itself is ``factor @ factor.T`` where
    ``factor = U_K diag(1/sqrt(lambda_K))`` for the retained eigenpairs.
    """

    factor: NDArray
    rank: int
    floor: float

    @property
    def matrix(self) -> NDArray:
        """Materialize the pseudo-inverse as a dense symmetric matrix."""
        return self.factor @ self.factor.T


@dataclass(frozen=True)
class PseudoInverseCheck:
    """Residuals and verdicts for the four defining pseudo-inverse identities."""

    residuals: tuple
    passed: tuple
    tolerance: float

    @property
    def all_passed(self) -> bool:
        return all(self.passed)


def sample_covariance(data: NDArray, center: bool = True) -> NDArray:
    """Sample covariance of the columns of ``data``.

    Parameters
    ----------
    data : ndarray, shape (m, n)
        Matrix whose n columns are samples of dimension m.
    center : bool
        Subtract the mean column before forming the outer products. The
        default is on; disable it only when the samples are known to have
        zero mean.

    Returns
    -------
    ndarray, shape (m, m)
        Symmetric PSD estimate ``D D^T / (n - 1)``.
    """
    data = np.asarray(data, dtype=float)
    if data.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got ndim={data.ndim}")
    n = data.shape[1]
    if n < 2:
        raise InsufficientSamplesError(
            f"covariance needs at least 2 samples, got {n}"
        )
    if center:
        data = data - data.mean(axis=1, keepdims=True)
    cov = (data @ data.T) / (n - 1)
    return 0.5 * (cov + cov.T)


def sym_evd(matrix: NDArray) -> SymmetricEVD:
    """Full eigendecomposition of a symmetric matrix.

    The input is symmetrized as ``(S + S^T) / 2`` to absorb round-off before
    decomposition; inputs that are not symmetric to within 1e-9 (relative)
    are rejected. Eigenvalues come back sorted descending with matching
    orthonormal eigenvector columns.
    """
    s = np.asarray(matrix, dtype=float)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {s.shape}")
    if not np.all(np.isfinite(s)):
        raise ValueError("matrix contains non-finite entries")
    scale = max(np.abs(s).max(), 1.0)
    if np.abs(s - s.T).max() > _SYMMETRY_TOL * scale:
        raise ValueError("matrix is not symmetric within tolerance 1e-9")
    s = 0.5 * (s + s.T)
    eigenvalues, eigenvectors = np.linalg.eigh(s)
    order = np.argsort(eigenvalues)[::-1]
    eigenvalues = eigenvalues[order]
    eigenvectors = eigenvectors[:, order]
    eigenvectors = _fix_signs(eigenvectors)
    return SymmetricEVD(eigenvalues=eigenvalues, eigenvectors=eigenvectors)


def _fix_signs(vectors: NDArray) -> NDArray:
    """Flip each column so its largest-magnitude entry is positive."""
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def pinv_psd(matrix: NDArray, rank: int | None = None,
             floor: float | None = None) -> PsdPseudoInverse:
    """Pseudo-inverse of a symmetric PSD matrix via its eigendecomposition.

    Parameters
    ----------
    matrix : ndarray, shape (m, m)
        Symmetric PSD matrix. Slightly negative eigenvalues (down to
        ``-1e-9 * lambda_max``) are clipped to zero.
    rank : int, optional
        Number of leading eigenpairs to invert. When omitted, every
        eigenvalue above ``floor * lambda_max`` is retained.
    floor : float, optional
        Relative eigenvalue floor; defaults to 1e-12. Ignored for deciding
        how many pairs to keep when ``rank`` is given, but a requested rank
        reaching below the floor raises ``RankDeficiencyError``.

    Returns
    -------
    PsdPseudoInverse
        Factor ``W = U_K diag(lambda_K^{-1/2})`` with ``W W^T`` the
        pseudo-inverse.
    """
    if floor is None:
        floor = DEFAULT_EIGENVALUE_FLOOR
    evd = sym_evd(matrix)
    eigenvalues = evd.eigenvalues.copy()
    lam_max = eigenvalues[0] if eigenvalues.size else 0.0
    if lam_max < 0:
        raise ValueError("matrix is not PSD: all eigenvalues negative")
    clip = _NEGATIVE_CLIP * max(lam_max, 1.0)
    if eigenvalues[-1] < -clip:
        raise ValueError(
            f"matrix is not PSD: smallest eigenvalue {eigenvalues[-1]:.3e}"
        )
    eigenvalues[eigenvalues < 0.0] = 0.0

    abs_floor = floor * lam_max
    numerical_rank = int(np.sum(eigenvalues > abs_floor))
    if rank is None:
        rank = numerical_rank
    elif rank > numerical_rank:
        raise RankDeficiencyError(
            f"requested rank {rank} exceeds numerical rank {numerical_rank}",
            attainable_rank=numerical_rank,
        )
    if rank < 0:
        raise ValueError("rank must be nonnegative")

    kept = eigenvalues[:rank]
    factor = evd.eigenvectors[:, :rank] / np.sqrt(kept)[np.newaxis, :] \
        if rank > 0 else np.zeros((matrix.shape[0], 0))
    return PsdPseudoInverse(factor=factor, rank=rank, floor=abs_floor)


def check_pseudoinverse_properties(matrix: NDArray, pseudo_inverse: NDArray,
                                   tol: float = 1e-7) -> PseudoInverseCheck:
    """Verify the four defining identities of the Moore-Penrose inverse.

    Reports the Frobenius norms of the residuals of
    ``S S+ S - S``, ``S+ S S+ - S+``, ``(S S+)^T - S S+`` and
    ``(S+ S)^T - S+ S``, each measured relative to the norm of the quantity
    it should reproduce, together with pass/fail at ``tol``.
    """
    s = np.asarray(matrix, dtype=float)
    sdag = np.asarray(pseudo_inverse, dtype=float)
    if s.shape != sdag.shape or s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise ValueError(
            f"dimension mismatch: {s.shape} versus {sdag.shape}"
        )
    s_sdag = s @ sdag
    sdag_s = sdag @ s
    residuals = (
        _relative_norm(s_sdag @ s - s, s),
        _relative_norm(sdag_s @ sdag - sdag, sdag),
        _relative_norm(s_sdag.T - s_sdag, s_sdag),
        _relative_norm(sdag_s.T - sdag_s, sdag_s),
    )
    passed = tuple(r <= tol for r in residuals)
    return PseudoInverseCheck(residuals=residuals, passed=passed, tolerance=tol)


def _relative_norm(residual: NDArray, reference: NDArray) -> float:
    denom = np.linalg.norm(reference)
    num = np.linalg.norm(residual)
    if denom == 0.0:
        return float(num)
    return float(num / denom)
