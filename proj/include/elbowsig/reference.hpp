#pragma once

#include "elbowsig/clustering.hpp"
#include "elbowsig/dataset.hpp"
#include "elbowsig/elbow.hpp"
#include "elbowsig/rng.hpp"

#include <string>
#include <vector>

namespace elbowsig {

enum class ReferenceType { BoundingBoxUniform, PcaAlignedUniform };

std::string reference_type_name(ReferenceType t);       // "bbox" / "pca"
ReferenceType reference_type_from_name(const std::string& name);

/// Null dataset with each feature drawn i.i.d. Uniform over its observed
/// range; constant columns reproduce the constant.
Dataset gen_bbox_uniform(const Dataset& data, const RngSpec& rng);

/// Null dataset drawn uniformly inside the data's PCA-aligned bounding
/// hyperrectangle (principal axes via SVD of the centered data), rotated back
/// and re-centered on the column means. Errors when all rows are identical.
Dataset gen_pca_uniform(const Dataset& data, const RngSpec& rng);

/// Elbow statistics of n_ref null references fitted with the same method
/// configuration as the observed data. h_matrix keeps the underlying
/// heterogeneity curves so dispersion-based baselines can reuse the fits.
struct ReferenceEnsemble {
    ReferenceType reference_type = ReferenceType::BoundingBoxUniform;
    int n_ref = 0;
    std::vector<int> k_values;   // 2..k_max, the delta grid
    Matrix delta_matrix;         // n_ref x (k_max-1)
    Matrix h_matrix;             // n_ref x (k_max+1), H over k = 1..k_max+1
    std::vector<RngSpec> seeds;  // per-reference generation streams
};

/// Reference r uses rng.substream(2r) for generation and rng.substream(2r+1)
/// for fitting, so results do not depend on the parallel schedule.
ReferenceEnsemble build_ensemble(const Dataset& data, const MethodConfig& config, int k_max,
                                 int n_ref, ReferenceType reference_type, const RngSpec& rng);

}  // namespace elbowsig
