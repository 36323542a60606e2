"""Cluster-informed Mahalanobis metrics and the experiments built on them."""

from .clustering import (
    ClusterAssignment,
    IndicatorMatrix,
    gap_statistic,
    indicator_from_labels,
    indicator_matrix,
    kmeans,
)
from .embedding import (
    Embedding,
    bipartition_accuracy,
    diffusion_map,
    embed_distances,
    gaussian_affinity,
    median_scale,
    spectral_bipartition,
)
from .linalg import (
    PsdPseudoInverse,
    PseudoInverseCheck,
    SymmetricEVD,
    check_pseudoinverse_properties,
    pinv_psd,
    sample_covariance,
    sym_evd,
)
from .metrics import (
    GlobalMetricModel,
    LocalMetricModel,
    distance_matrix,
    fit_global,
    fit_local,
    global_distance,
    global_model_from_covariance,
    local_distance,
    nearest_neighbor_indices,
)
from .pca import (
    PrincipalBasis,
    constrained_pca,
    pca_gradient,
    pca_top_k,
    project_onto_cluster_subspace,
    reconstruction_error,
)
from .survival import (
    LogRankResult,
    SurvivalCurve,
    SurvivalRecord,
    kaplan_meier,
    logrank_test,
)
from .synth import (
    BlockModelDataset,
    LinearModelDataset,
    SurrogateDataset,
    gen_block_model,
    gen_linear_model,
    gen_survival_surrogate,
    pd_error,
)

__version__ = "0.1.0"

__all__ = [
    "ClusterAssignment",
    "IndicatorMatrix",
    "gap_statistic",
    "indicator_from_labels",
    "indicator_matrix",
    "kmeans",
    "Embedding",
    "bipartition_accuracy",
    "diffusion_map",
    "embed_distances",
    "gaussian_affinity",
    "median_scale",
    "spectral_bipartition",
    "PsdPseudoInverse",
    "PseudoInverseCheck",
    "SymmetricEVD",
    "check_pseudoinverse_properties",
    "pinv_psd",
    "sample_covariance",
    "sym_evd",
    "GlobalMetricModel",
    "LocalMetricModel",
    "distance_matrix",
    "fit_global",
    "fit_local",
    "global_distance",
    "global_model_from_covariance",
    "local_distance",
    "nearest_neighbor_indices",
    "PrincipalBasis",
    "constrained_pca",
    "pca_gradient",
    "pca_top_k",
    "project_onto_cluster_subspace",
    "reconstruction_error",
    "LogRankResult",
    "SurvivalCurve",
    "SurvivalRecord",
    "kaplan_meier",
    "logrank_test",
    "BlockModelDataset",
    "LinearModelDataset",
    "SurrogateDataset",
    "gen_block_model",
    "gen_linear_model",
    "gen_survival_surrogate",
    "pd_error",
    "__version__",
]
