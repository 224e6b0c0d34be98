#include "elbowsig/reference.hpp"

#include "elbowsig/parallel.hpp"

#include <Eigen/SVD>

#include <numeric>
#include <string>
#include <utility>

namespace elbowsig {

std::string reference_type_name(ReferenceType t) {
    return t == ReferenceType::BoundingBoxUniform ? "bbox" : "pca";
}

ReferenceType reference_type_from_name(const std::string& name) {
    if (name == "bbox") return ReferenceType::BoundingBoxUniform;
    if (name == "pca") return ReferenceType::PcaAlignedUniform;
    throw DataError("unknown reference type '" + name + "' (expected bbox or pca)");
}

Dataset gen_bbox_uniform(const Dataset& data, const RngSpec& rng_spec) {
    const Matrix& X = data.values();
    const std::vector<FeatureRange> ranges = column_ranges(data);
    RngStream rng(rng_spec);
    Matrix out(X.rows(), X.cols());
    for (Eigen::Index i = 0; i < out.rows(); ++i)
        for (Eigen::Index j = 0; j < out.cols(); ++j)
            out(i, j) = rng.uniform(ranges[static_cast<size_t>(j)].lo,
                                    ranges[static_cast<size_t>(j)].hi);
    return Dataset(std::move(out), data.feature_names());
}

Dataset gen_pca_uniform(const Dataset& data, const RngSpec& rng_spec) {
    const Matrix& X = data.values();
    const Eigen::RowVectorXd mean = X.colwise().mean();
    const Matrix centered = X.rowwise() - mean;
    if (centered.cwiseAbs().maxCoeff() == 0.0)
        throw DataError("PCA-aligned reference requires non-degenerate data "
                        "(all rows are identical)");

    Eigen::JacobiSVD<Matrix> svd(centered, Eigen::ComputeThinV);
    const Matrix& V = svd.matrixV();        // D x p orthonormal principal axes
    const Matrix scores = centered * V;      // N x p PC coordinates of the data

    RngStream rng(rng_spec);
    Matrix samples(scores.rows(), scores.cols());
    for (Eigen::Index j = 0; j < scores.cols(); ++j) {
        const double lo = scores.col(j).minCoeff();
        const double hi = scores.col(j).maxCoeff();
        for (Eigen::Index i = 0; i < scores.rows(); ++i) samples(i, j) = rng.uniform(lo, hi);
    }

    Matrix out = samples * V.transpose();
    out.rowwise() += mean;
    return Dataset(std::move(out), data.feature_names());
}

ReferenceEnsemble build_ensemble(const Dataset& data, const MethodConfig& config, int k_max,
                                 int n_ref, ReferenceType reference_type, const RngSpec& rng) {
    if (n_ref < 2) throw DataError("n_ref must be at least 2, got " + std::to_string(n_ref));
    if (k_max < 2) throw DataError("k_max must be at least 2, got " + std::to_string(k_max));
    if (static_cast<Eigen::Index>(k_max) + 1 > data.n_rows())
        throw DataError("k_max+1 = " + std::to_string(k_max + 1) + " clusters exceed the N = " +
                        std::to_string(data.n_rows()) + " available points");

    ReferenceEnsemble ensemble;
    ensemble.reference_type = reference_type;
    ensemble.n_ref = n_ref;
    ensemble.k_values.resize(static_cast<size_t>(k_max) - 1);
    std::iota(ensemble.k_values.begin(), ensemble.k_values.end(), 2);
    ensemble.delta_matrix.resize(n_ref, k_max - 1);
    ensemble.h_matrix.resize(n_ref, k_max + 1);
    ensemble.seeds.resize(static_cast<size_t>(n_ref));

    parallel_for(static_cast<size_t>(n_ref), [&](size_t r) {
        const RngSpec gen_spec = rng.substream(2 * static_cast<std::uint64_t>(r));
        const RngSpec fit_spec = rng.substream(2 * static_cast<std::uint64_t>(r) + 1);
        ensemble.seeds[r] = gen_spec;
        try {
            const Dataset reference = reference_type == ReferenceType::BoundingBoxUniform
                                          ? gen_bbox_uniform(data, gen_spec)
                                          : gen_pca_uniform(data, gen_spec);
            MethodConfig fit_config = config;
            fit_config.rng = fit_spec;
            const HeterogeneitySequence H = heterogeneity_sequence(reference, fit_config, k_max);
            const ElbowSequence deltas = elbow_sequence(H);
            for (int j = 0; j <= k_max; ++j)
                ensemble.h_matrix(static_cast<Eigen::Index>(r), j) = H.H[static_cast<size_t>(j)];
            for (int j = 0; j < k_max - 1; ++j)
                ensemble.delta_matrix(static_cast<Eigen::Index>(r), j) =
                    deltas.delta[static_cast<size_t>(j)];
        } catch (const DataError& e) {
            throw DataError("reference " + std::to_string(r) + ": " + e.what());
        } catch (const NumericError& e) {
            throw NumericError("reference " + std::to_string(r) + ": " + e.what());
        }
    });
    return ensemble;
}

}  // namespace elbowsig
