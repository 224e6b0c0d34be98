"""Statistical significance for the clustering elbow.

The heavy lifting lives in the compiled extension ``elbowsig._core``; this
package re-exports its public surface.
"""

from ._core import (
    AnalyzeOptions,
    ClusteringOutcome,
    DataError,
    Dataset,
    Dendrogram,
    ElbowSequence,
    GapResult,
    HeterogeneitySequence,
    IndexCurve,
    MethodConfig,
    NumericError,
    PValueSequence,
    ReferenceEnsemble,
    RngSpec,
    SignificanceReport,
    ThresholdCalibration,
    analyze,
    analyze_against,
    bh_fdr,
    build_ensemble,
    calibrate_threshold,
    calinski_harabasz,
    column_ranges,
    cut_dendrogram,
    davies_bouldin,
    elbow_sequence,
    empirical_pvalues,
    fcm,
    gap_statistic,
    gen_blobs,
    gen_bbox_uniform,
    gen_pca_uniform,
    gen_unstructured,
    gmm_em,
    heterogeneity_sequence,
    index_curve,
    kmeans,
    load_csv,
    max_threads,
    partition_inertia,
    predicted_delta_fcm,
    predicted_delta_gmm,
    predicted_delta_large_n,
    set_max_threads,
    silhouette,
    standardized,
    ward_dendrogram,
    write_csv,
)

__version__ = "1.0.0"

__all__ = [
    "AnalyzeOptions",
    "ClusteringOutcome",
    "DataError",
    "Dataset",
    "Dendrogram",
    "ElbowSequence",
    "GapResult",
    "HeterogeneitySequence",
    "IndexCurve",
    "MethodConfig",
    "NumericError",
    "PValueSequence",
    "ReferenceEnsemble",
    "RngSpec",
    "SignificanceReport",
    "ThresholdCalibration",
    "analyze",
    "analyze_against",
    "bh_fdr",
    "build_ensemble",
    "calibrate_threshold",
    "calinski_harabasz",
    "column_ranges",
    "cut_dendrogram",
    "davies_bouldin",
    "elbow_sequence",
    "empirical_pvalues",
    "fcm",
    "gap_statistic",
    "gen_blobs",
    "gen_bbox_uniform",
    "gen_pca_uniform",
    "gen_unstructured",
    "gmm_em",
    "heterogeneity_sequence",
    "index_curve",
    "kmeans",
    "load_csv",
    "max_threads",
    "partition_inertia",
    "predicted_delta_fcm",
    "predicted_delta_gmm",
    "predicted_delta_large_n",
    "set_max_threads",
    "silhouette",
    "standardized",
    "ward_dendrogram",
    "write_csv",
]
