#include "elbowsig/clustering.hpp"

#include "clustering_internal.hpp"

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace elbowsig {
namespace {

Matrix squared_distances(const Matrix& X, const Matrix& centroids) {
    const Eigen::Index n = X.rows();
    const Eigen::Index k = centroids.rows();
    Matrix d2(n, k);
    for (Eigen::Index j = 0; j < k; ++j)
        d2.col(j) = (X.rowwise() - centroids.row(j)).rowwise().squaredNorm();
    return d2;
}

/// w_ij = [sum_l (d_ij / d_il)^{2/(m-1)}]^{-1}; a point at zero distance from
/// one or more centroids splits full membership among those centroids.
void update_memberships(const Matrix& d2, double exponent, Matrix& W) {
    const Eigen::Index n = d2.rows();
    const Eigen::Index k = d2.cols();
    for (Eigen::Index i = 0; i < n; ++i) {
        int n_zero = 0;
        for (Eigen::Index j = 0; j < k; ++j)
            if (d2(i, j) == 0.0) ++n_zero;
        if (n_zero > 0) {
            for (Eigen::Index j = 0; j < k; ++j)
                W(i, j) = d2(i, j) == 0.0 ? 1.0 / n_zero : 0.0;
            continue;
        }
        for (Eigen::Index j = 0; j < k; ++j) {
            double sum = 0.0;
            for (Eigen::Index l = 0; l < k; ++l) sum += std::pow(d2(i, j) / d2(i, l), exponent);
            W(i, j) = 1.0 / sum;
        }
    }
}

struct FcmRun {
    Matrix centroids;
    Matrix W;
    double objective = 0.0;
    int iterations = 0;
    std::vector<double> trace;
};

FcmRun run_fcm(const Matrix& X, int k, const MethodConfig& config, RngStream& rng) {
    const Eigen::Index n = X.rows();
    const double m = config.fuzzifier;
    const double exponent = 1.0 / (m - 1.0);

    FcmRun res;
    const std::vector<size_t> seed_idx = sample_without_replacement(static_cast<size_t>(n),
                                                                    static_cast<size_t>(k), rng);
    res.centroids.resize(k, X.cols());
    for (int j = 0; j < k; ++j) res.centroids.row(j) = X.row(static_cast<Eigen::Index>(seed_idx[static_cast<size_t>(j)]));
    res.W.resize(n, k);

    double prev_J = std::numeric_limits<double>::infinity();
    for (int it = 0; it < config.max_iter; ++it) {
        update_memberships(squared_distances(X, res.centroids), exponent, res.W);

        const Matrix Wm = res.W.array().pow(m).matrix();
        for (int j = 0; j < k; ++j) {
            const double denom = Wm.col(j).sum();
            if (denom > 0.0) res.centroids.row(j) = (Wm.col(j).transpose() * X) / denom;
            // denom == 0 only when crisp rules starve the cluster; keep its centroid.
        }

        const double J = (Wm.array() * squared_distances(X, res.centroids).array()).sum();
        res.trace.push_back(J);
        ++res.iterations;
        if (it > 0 && relative_change(prev_J, J) < config.tol) break;
        prev_J = J;
    }
    res.objective = res.trace.back();
    return res;
}

}  // namespace

ClusteringOutcome fcm(const Dataset& data, int k, const MethodConfig& config) {
    const Matrix& X = data.values();
    detail::validate_fit_args(config, k, X.rows());
    if (!(config.fuzzifier > 1.0))
        throw DataError("fuzzifier must be > 1, got " + std::to_string(config.fuzzifier));

    RngStream rng(config.rng);
    FcmRun best;
    bool have_best = false;
    for (int run = 0; run < config.n_init; ++run) {
        FcmRun candidate = run_fcm(X, k, config, rng);
        if (!have_best || candidate.objective < best.objective) {
            best = std::move(candidate);
            have_best = true;
        }
    }

    ClusteringOutcome out;
    out.k = k;
    out.centroids = std::move(best.centroids);
    out.heterogeneity = best.objective;
    out.iterations = best.iterations;
    out.objective_trace = std::move(best.trace);
    out.hard_labels.resize(static_cast<size_t>(X.rows()));
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        Eigen::Index arg = 0;
        best.W.row(i).maxCoeff(&arg);
        out.hard_labels[static_cast<size_t>(i)] = static_cast<int>(arg);
    }
    out.memberships = std::move(best.W);
    return out;
}

}  // namespace elbowsig
