"""Principal directions: plain top-K PCA and the cluster-constrained variant.

The constrained solver minimizes the PCA reconstruction error over bases
whose columns live in the span of a cluster indicator, by projected
gradient descent: a gradient step followed by the cluster-averaging
projection ``H H^T``, repeated until the projected gradient is small.
"""

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .clustering import IndicatorMatrix
from .errors import DivergenceError, RankDeficiencyError
from .linalg import DEFAULT_EIGENVALUE_FLOOR, sym_evd

_MIN_STEP = 1e-16


@dataclass(frozen=True)
class PrincipalBasis:
    """A set of principal directions with their variances.

    ``informed`` records whether the directions were constrained to a
    cluster indicator subspace. For constrained bases the columns are unit
    length but not necessarily mutually orthogonal.
    """

    directions: NDArray
    eigenvalues: NDArray
    informed: bool = False
    iterations_run: int = 0
    final_gradient_norm: float = 0.0

    @property
    def n_directions(self) -> int:
        return self.directions.shape[1]


def pca_top_k(sigma: NDArray, k: int) -> PrincipalBasis:
    """Top-``k`` eigenpairs of a symmetric PSD matrix, descending."""
    evd = sym_evd(sigma)
    lam = evd.eigenvalues
    lam_max = max(lam[0], 0.0) if lam.size else 0.0
    numerical_rank = int(np.sum(lam > DEFAULT_EIGENVALUE_FLOOR * lam_max))
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > numerical_rank:
        raise RankDeficiencyError(
            f"requested {k} directions but numerical rank is {numerical_rank}",
            attainable_rank=numerical_rank,
        )
    return PrincipalBasis(
        directions=evd.eigenvectors[:, :k],
        eigenvalues=lam[:k],
        informed=False,
    )


def project_onto_cluster_subspace(directions: NDArray,
                                  indicator: IndicatorMatrix) -> NDArray:
    """Average each direction's coordinates within every row cluster.

    This is ``H H^T U``: the orthogonal projection onto the indicator
    span, which makes every column piecewise constant on the clusters.
    """
    directions = np.asarray(directions, dtype=float)
    if directions.shape[0] != indicator.matrix.shape[0]:
        raise ValueError(
            f"direction rows {directions.shape[0]} do not match indicator "
            f"rows {indicator.matrix.shape[0]}"
        )
    return indicator.project(directions)


def reconstruction_error(directions: NDArray, sigma: NDArray) -> float:
    """Expected squared residual of projecting samples onto ``directions``.

    Evaluates ``trace((I - U U^T) Sigma (I - U U^T))``, which for an
    orthonormal ``U`` equals the total variance not captured by its span.
    """
    u = np.asarray(directions, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    if u.shape[0] != sigma.shape[0]:
        raise ValueError("dimension mismatch between directions and matrix")
    su = sigma @ u
    a0 = u.T @ su
    b0 = u.T @ u
    value = np.trace(sigma) - 2.0 * np.trace(a0) + np.trace(a0 @ b0)
    return float(max(value, 0.0))


def pca_gradient(directions: NDArray, sigma: NDArray) -> NDArray:
    """Gradient of the reconstruction error with respect to the basis.

    Equals ``-2 ((I - U U^T) Sigma + Sigma (I - U U^T)) U`` and vanishes at
    the unconstrained optimum (the leading eigenvectors).
    """
    u = np.asarray(directions, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    su = sigma @ u
    return -2.0 * (2.0 * su - u @ (u.T @ su) - su @ (u.T @ u))


def _error_terms(sigma_trace, a0, a1, a2, b0, b1, b2, alpha):
    """Reconstruction error of ``U - alpha V`` from precomputed small blocks."""
    a = a0 - alpha * (a1 + a1.T) + alpha * alpha * a2
    b = b0 - alpha * (b1 + b1.T) + alpha * alpha * b2
    return sigma_trace - 2.0 * np.trace(a) + np.einsum("ij,ji->", a, b)


def constrained_pca(sigma: NDArray, indicator: IndicatorMatrix, k: int,
                    init: PrincipalBasis | None = None,
                    step_rule: str = "backtracking", step_size: float = 1.0,
                    grad_tol: float | None = None, max_iters: int = 200,
                    orthonormalize: bool = False) -> PrincipalBasis:
    """Minimize reconstruction error over bases inside the indicator span.

    Starting from ``init`` (the plain top-``k`` basis when omitted), the
    solver first projects the basis into the indicator span and then
    alternates gradient steps with the span projection. With the default
    backtracking rule each full iteration strictly decreases the
    reconstruction error; iteration stops once the projected gradient norm
    falls below ``grad_tol`` (default ``1e-6 * trace(sigma) / m``) or after
    ``max_iters`` steps.

    With ``max_iters=0`` the result is exactly the one-shot cluster
    averaging of the initial basis, which coincides with the first
    iteration of the scheme when started from the unconstrained optimum.

    The returned eigenvalues are carried over from the initial basis; the
    constrained directions are normalized to unit length and, unless
    ``orthonormalize`` is set, not re-orthogonalized.
    """
    sigma = np.asarray(sigma, dtype=float)
    m = sigma.shape[0]
    if init is None:
        init = pca_top_k(sigma, k)
    u = np.array(init.directions[:, :k], dtype=float)
    if u.shape != (m, k):
        raise ValueError(
            f"init must provide at least {k} directions of dimension {m}"
        )
    if grad_tol is None:
        grad_tol = 1e-6 * np.trace(sigma) / m
    if grad_tol <= 0.0:
        raise ValueError("grad_tol must be positive")
    if step_rule not in ("backtracking", "fixed"):
        raise ValueError(f"unknown step rule: {step_rule!r}")

    sigma_trace = float(np.trace(sigma))
    u = indicator.project(u)

    iterations = 0
    pg_norm = np.nan
    alpha_start = step_size
    for _ in range(max_iters):
        su = sigma @ u
        a0 = u.T @ su
        b0 = u.T @ u
        grad = -2.0 * (2.0 * su - u @ a0 - su @ b0)
        v = indicator.project(grad)
        pg_norm = float(np.linalg.norm(v))
        if not np.isfinite(pg_norm):
            raise DivergenceError(
                "projected gradient became non-finite; reduce the step size"
            )
        if pg_norm < grad_tol:
            break
        r_current = sigma_trace - 2.0 * np.trace(a0) + np.trace(a0 @ b0)
        sv = sigma @ v
        a1 = u.T @ sv
        a2 = v.T @ sv
        b1 = u.T @ v
        b2 = v.T @ v
        if step_rule == "fixed":
            alpha = step_size
            r_new = _error_terms(sigma_trace, a0, a1, a2, b0, b1, b2, alpha)
            if not np.isfinite(r_new):
                raise DivergenceError(
                    "iteration diverged with the fixed step; reduce step_size"
                )
        else:
            alpha = alpha_start
            r_new = _error_terms(sigma_trace, a0, a1, a2, b0, b1, b2, alpha)
            while not (r_new < r_current) and alpha >= _MIN_STEP:
                alpha *= 0.5
                r_new = _error_terms(sigma_trace, a0, a1, a2, b0, b1, b2,
                                     alpha)
            if not (r_new < r_current):
                # No achievable decrease: numerically stationary.
                break
            assert r_new < r_current, "backtracking accepted a non-descent step"
            alpha_start = min(alpha * 2.0, 1e6)
        u = u - alpha * v
        iterations += 1
    else:
        # Loop exhausted max_iters; report the last projected gradient norm.
        if max_iters > 0:
            grad = pca_gradient(u, sigma)
            pg_norm = float(np.linalg.norm(indicator.project(grad)))

    if max_iters == 0:
        pg_norm = float(np.linalg.norm(indicator.project(pca_gradient(u, sigma))))

    norms = np.linalg.norm(u, axis=0)
    if np.any(norms <= 0.0) or not np.all(np.isfinite(norms)):
        raise RankDeficiencyError(
            "a constrained direction collapsed to zero; the indicator span "
            "cannot support the requested number of directions"
        )
    u = u / norms[np.newaxis, :]
    if orthonormalize:
        q, r = np.linalg.qr(u)
        u = q * np.sign(np.diag(r))[np.newaxis, :]
    return PrincipalBasis(
        directions=u,
        eigenvalues=np.array(init.eigenvalues[:k], dtype=float),
        informed=True,
        iterations_run=iterations,
        final_gradient_norm=pg_norm,
    )
