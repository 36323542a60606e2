"""Seeded generators for the two synthetic models and their ground truths.

``gen_linear_model`` produces high-dimensional samples that are a fixed
linear image of hidden points in the unit square, with the mixing rows
drawn around three well-separated cluster means. ``gen_block_model``
produces two column types over clustered, within-cluster-correlated rows,
and carries its exact column covariance. Both are bit-reproducible for a
fixed seed.
"""

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .clustering import indicator_from_labels
from .survival import SurvivalRecord

LINEAR_MODEL_BLOCK_MEANS = np.array([
    [1.0 / 3.0, 1.0],
    [1.0 / 3.0, -1.0],
    [-1.0, -3.0],
])
LINEAR_MODEL_ROW_STD = 0.1  # rows of the mixing matrix scatter with cov 0.01 I


@dataclass(frozen=True)
class LinearModelDataset:
    """Samples ``D = A X`` with hidden points X uniform in the unit square."""

    matrix: NDArray        # (m, n)
    hidden: NDArray        # (2, n)
    mixing: NDArray        # (m, 2)
    row_blocks: NDArray    # (m,) block index of each mixing row


def gen_linear_model(n_samples: int, seed=None,
                     rows_per_block: int = 400) -> LinearModelDataset:
    """Generate the linear hidden-square dataset.

    The mixing matrix has three row blocks of ``rows_per_block`` rows each,
    drawn once per seed around fixed two-dimensional means and then held
    fixed; hidden samples are uniform on the unit square.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    # Separate sub-streams keep the realized mixing matrix independent of
    # how many samples are requested.
    mixing_seed, hidden_seed = np.random.SeedSequence(seed).spawn(2)
    rng = np.random.default_rng(mixing_seed)
    blocks = []
    for mean in LINEAR_MODEL_BLOCK_MEANS:
        blocks.append(mean + LINEAR_MODEL_ROW_STD
                      * rng.standard_normal((rows_per_block, 2)))
    mixing = np.vstack(blocks)
    hidden = np.random.default_rng(hidden_seed).random((2, n_samples))
    row_blocks = np.repeat(np.arange(3), rows_per_block)
    return LinearModelDataset(matrix=mixing @ hidden, hidden=hidden,
                              mixing=mixing, row_blocks=row_blocks)


@dataclass(frozen=True)
class BlockModelDataset:
    """Two-type columns over clustered rows, with the exact column covariance."""

    matrix: NDArray          # (m, n)
    column_types: NDArray    # (n,) 0 or 1
    row_clusters: NDArray    # (m,)
    cluster_means: NDArray   # (K, 2): per-cluster mean for each type
    sigma2: float
    rho: float
    covariance: NDArray = field(repr=False)  # (m, m) exact column covariance

    def top_eigenbasis(self, k: int) -> NDArray:
        """Leading ``k`` eigenvectors of the exact covariance.

        The exact covariance maps the cluster-indicator span to itself and
        every eigenvalue inside that span exceeds the flat level
        ``sigma2 - rho`` outside it (this needs ``rho > 0``), so the
        leading eigenvectors come from a small dense problem of
        cluster-count size.
        """
        if self.rho <= 0.0:
            raise ValueError(
                "top_eigenbasis requires rho > 0; otherwise the leading "
                "eigenspace is not determined by the cluster structure"
            )
        h = indicator_from_labels(self.row_clusters).matrix
        n_clusters = h.shape[1]
        if not 1 <= k <= n_clusters:
            raise ValueError(f"k must be in [1, {n_clusters}]")
        sizes = np.bincount(self.row_clusters)
        delta = self.cluster_means[:, 0] - self.cluster_means[:, 1]
        delta_h = np.sqrt(sizes) * delta  # H^T applied to the expanded delta
        small = np.diag(self.sigma2 - self.rho + self.rho * sizes) \
            + 0.25 * np.outer(delta_h, delta_h)
        lam, vec = np.linalg.eigh(small)
        order = np.argsort(lam)[::-1]
        return h @ vec[:, order[:k]]


def _block_sizes(m: int, n_clusters: int) -> NDArray:
    sizes = np.full(n_clusters, m // n_clusters)
    sizes[-1] += m - sizes.sum()
    return sizes


def _draw_cluster_means(n_clusters: int, rng,
                        offset_range=(0.5, 1.5)) -> NDArray:
    """Per-cluster type means: base level plus an alternating-sign offset."""
    mean_a = rng.random(n_clusters)
    offsets = rng.uniform(*offset_range, n_clusters)
    signs = np.where(np.arange(n_clusters) % 2 == 0, 1.0, -1.0)
    mean_b = mean_a + signs * offsets
    return np.column_stack([mean_a, mean_b])


def gen_block_model(m: int, n: int, n_clusters: int, sigma2: float = 1.0,
                    rho: float = 0.5, means: NDArray | None = None,
                    offset_range=(0.5, 1.5), seed=None) -> BlockModelDataset:
    """Generate the two-type block-covariance dataset.

    Rows split into ``n_clusters`` groups of (near) equal size; entries in
    cluster k of a type-t column are Gaussian around ``means[k, t]`` with
    variance ``sigma2`` and within-cluster covariance ``rho``, realized
    through a shared per-(cluster, column) factor. The exact column
    covariance (block structure plus the between-type mean separation) is
    attached.
    """
    if not 1 <= n_clusters <= m:
        raise ValueError(f"n_clusters must be in [1, {m}]")
    if not 0.0 <= rho <= sigma2:
        raise ValueError(
            f"need 0 <= rho <= sigma2 for the shared-factor construction, "
            f"got rho={rho}, sigma2={sigma2}"
        )
    rng = np.random.default_rng(seed)
    sizes = _block_sizes(m, n_clusters)
    row_clusters = np.repeat(np.arange(n_clusters), sizes)
    if means is None:
        means = _draw_cluster_means(n_clusters, rng, offset_range)
    else:
        means = np.asarray(means, dtype=float)
        if means.shape != (n_clusters, 2):
            raise ValueError(f"means must have shape ({n_clusters}, 2)")
    column_types = (rng.random(n) < 0.5).astype(int)

    base = means[row_clusters][:, column_types]             # (m, n)
    shared = rng.standard_normal((n_clusters, n))[row_clusters]
    noise = rng.standard_normal((m, n))
    matrix = base + np.sqrt(rho) * shared + np.sqrt(sigma2 - rho) * noise

    covariance = _exact_block_covariance(row_clusters, means, sigma2, rho)
    min_eig = np.linalg.eigvalsh(covariance).min()
    assert min_eig > -1e-9 * max(sigma2, 1.0), \
        "exact covariance is not PSD"
    return BlockModelDataset(
        matrix=matrix, column_types=column_types, row_clusters=row_clusters,
        cluster_means=means, sigma2=sigma2, rho=rho, covariance=covariance,
    )


def _exact_block_covariance(row_clusters, means, sigma2, rho) -> NDArray:
    same_cluster = row_clusters[:, None] == row_clusters[None, :]
    cov = np.where(same_cluster, rho, 0.0)
    np.fill_diagonal(cov, sigma2)
    delta = (means[:, 0] - means[:, 1])[row_clusters]
    return cov + 0.25 * np.outer(delta, delta)


def pd_error(u_hat: NDArray, u_ref: NDArray, norm: str = "frobenius") -> float:
    """Distance between the subspaces spanned by two direction sets.

    Measures ``||P_ref - P_hat||`` where P is the orthogonal projector onto
    the column span, so the result is invariant to any rotation of either
    basis. Column sets that are normalized but not orthogonal are handled
    through a QR-based projector.
    """
    u_hat = np.asarray(u_hat, dtype=float)
    u_ref = np.asarray(u_ref, dtype=float)
    if u_hat.shape != u_ref.shape:
        raise ValueError(
            f"shape mismatch: {u_hat.shape} versus {u_ref.shape}"
        )
    diff = _projector(u_ref) - _projector(u_hat)
    if norm == "frobenius":
        return float(np.linalg.norm(diff, "fro"))
    if norm == "spectral":
        return float(np.linalg.norm(diff, 2))
    raise ValueError(f"unknown norm: {norm!r}")


def _projector(u: NDArray) -> NDArray:
    q, _ = np.linalg.qr(u)
    return q @ q.T


@dataclass(frozen=True)
class SurrogateDataset:
    """Expression-like matrix with planted subject groups and survival times."""

    matrix: NDArray          # (m, n)
    ids: list
    groups: NDArray          # (n,) planted risk group, 0 = higher risk
    times: NDArray           # (n,)
    events: NDArray          # (n,) bool

    def records(self, labels=None) -> list:
        """Survival records grouped by ``labels`` (default: planted groups)."""
        groups = self.groups if labels is None else np.asarray(labels)
        return [
            SurvivalRecord(time=float(t), event=bool(e), group=int(g))
            for t, e, g in zip(self.times, self.events, groups)
        ]


def gen_survival_surrogate(m: int = 200, n: int = 82, n_clusters: int = 7,
                           sigma2=(1.0, 1.3), rho=(0.45, 0.6),
                           mean_gap: float = 0.55, hazard_scales=(20.0, 60.0),
                           censor_horizon: float = 80.0,
                           dropout: float = 0.15, seed=None,
                           ) -> SurrogateDataset:
    """Generate a synthetic stand-in for a gene-expression survival study.

    Subjects split into two planted groups with group-specific row-cluster
    means (separated by ``mean_gap`` in alternating directions) and
    group-specific local covariance (``sigma2`` and ``rho`` per group).
    Survival times are exponential with a group-dependent scale, censored
    administratively at ``censor_horizon`` and by uniform dropout.
    """
    rng = np.random.default_rng(seed)
    sizes = _block_sizes(m, n_clusters)
    row_clusters = np.repeat(np.arange(n_clusters), sizes)
    groups = (rng.random(n) < 0.5).astype(int)

    base = rng.uniform(0.0, 1.0, n_clusters)
    signs = np.where(np.arange(n_clusters) % 2 == 0, 1.0, -1.0)
    means = np.column_stack([base, base + signs * mean_gap])

    sigma2 = np.asarray(sigma2, dtype=float)
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0.0) or np.any(rho > sigma2):
        raise ValueError("need 0 <= rho <= sigma2 for both groups")

    mu = means[row_clusters][:, groups]                     # (m, n)
    shared = rng.standard_normal((n_clusters, n))[row_clusters]
    noise = rng.standard_normal((m, n))
    matrix = mu + np.sqrt(rho[groups]) * shared \
        + np.sqrt((sigma2 - rho)[groups]) * noise

    raw_times = rng.exponential(np.asarray(hazard_scales)[groups])
    dropout_times = np.where(rng.random(n) < dropout,
                             rng.uniform(0.0, censor_horizon, n), np.inf)
    cutoffs = np.minimum(censor_horizon, dropout_times)
    events = raw_times <= cutoffs
    times = np.minimum(raw_times, cutoffs)

    ids = [f"S{j:03d}" for j in range(n)]
    return SurrogateDataset(matrix=matrix, ids=ids, groups=groups,
                            times=times, events=events)
