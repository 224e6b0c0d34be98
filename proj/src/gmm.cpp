#include "elbowsig/clustering.hpp"

#include "clustering_internal.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

namespace elbowsig {
namespace {

struct GmmParams {
    Vector weights;                   // k
    Matrix means;                     // k x D
    std::vector<Matrix> covariances;  // k of D x D
};

struct EStep {
    Matrix resp;            // N x k responsibilities
    double total_ll = 0.0;  // sum_i ln p(x_i)
};

double resolve_covariance_reg(const Matrix& X, double configured) {
    if (configured > 0.0) return configured;
    const Eigen::RowVectorXd mean = X.colwise().mean();
    const double mean_feature_variance =
        (X.rowwise() - mean).array().square().colwise().mean().mean();
    const double reg = 1e-6 * mean_feature_variance;
    return reg > 0.0 ? reg : 1e-12;  // constant data would otherwise give a zero regularizer
}

EStep e_step(const Matrix& X, const GmmParams& params) {
    const Eigen::Index n = X.rows();
    const Eigen::Index dim = X.cols();
    const Eigen::Index k = params.means.rows();

    Matrix log_joint(n, k);  // ln pi_j + ln N(x_i | mu_j, Sigma_j)
    for (Eigen::Index j = 0; j < k; ++j) {
        const Eigen::LLT<Matrix> llt(params.covariances[static_cast<size_t>(j)]);
        if (llt.info() != Eigen::Success)
            throw NumericError("GMM component " + std::to_string(j) +
                               " covariance is not positive definite despite regularization");
        const Matrix L = llt.matrixL();
        const double log_det = 2.0 * L.diagonal().array().log().sum();
        const double log_norm =
            -0.5 * (static_cast<double>(dim) * std::log(2.0 * std::numbers::pi) + log_det);
        const double log_weight = params.weights(j) > 0.0
                                      ? std::log(params.weights(j))
                                      : -std::numeric_limits<double>::infinity();
        const Matrix centered_t = (X.rowwise() - params.means.row(j)).transpose();  // D x N
        const Matrix solved = L.triangularView<Eigen::Lower>().solve(centered_t);
        log_joint.col(j) =
            ((log_weight + log_norm) - 0.5 * solved.colwise().squaredNorm().transpose().array())
                .matrix();
    }

    EStep out;
    out.resp.resize(n, k);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double max_lj = log_joint.row(i).maxCoeff();
        const double lse = max_lj + std::log((log_joint.row(i).array() - max_lj).exp().sum());
        out.total_ll += lse;
        out.resp.row(i) = (log_joint.row(i).array() - lse).exp();
    }
    return out;
}

void m_step(const Matrix& X, const Matrix& resp, double reg, GmmParams& params) {
    const Eigen::Index n = X.rows();
    const Eigen::Index dim = X.cols();
    const Eigen::Index k = resp.cols();
    const Matrix identity = Matrix::Identity(dim, dim);

    for (Eigen::Index j = 0; j < k; ++j) {
        const double weight_sum = resp.col(j).sum();
        params.weights(j) = weight_sum / static_cast<double>(n);
        if (weight_sum <= 0.0) continue;  // dead component keeps its parameters, weight 0
        params.means.row(j) = (resp.col(j).transpose() * X) / weight_sum;
        const Matrix centered = X.rowwise() - params.means.row(j);
        params.covariances[static_cast<size_t>(j)] =
            (centered.transpose() * (centered.array().colwise() * resp.col(j).array()).matrix()) /
                weight_sum +
            reg * identity;
    }
}

GmmParams init_from_kmeans(const Matrix& X, const Dataset& data, int k,
                           const MethodConfig& config, double reg, std::uint64_t run_index) {
    MethodConfig km = config;
    km.method = Method::KMeans;
    km.n_init = 1;
    km.rng = config.rng.substream(run_index);
    const ClusteringOutcome seed = kmeans(data, k, km);

    const Eigen::Index dim = X.cols();
    GmmParams params;
    params.weights.resize(k);
    params.means = seed.centroids;
    params.covariances.assign(static_cast<size_t>(k), Matrix::Zero(dim, dim));

    std::vector<double> counts(static_cast<size_t>(k), 0.0);
    for (int label : seed.hard_labels) counts[static_cast<size_t>(label)] += 1.0;
    for (int j = 0; j < k; ++j) {
        Matrix scatter = Matrix::Zero(dim, dim);
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
            if (seed.hard_labels[static_cast<size_t>(i)] != j) continue;
            const Vector diff = (X.row(i) - params.means.row(j)).transpose();
            scatter += diff * diff.transpose();
        }
        const double count = std::max(counts[static_cast<size_t>(j)], 1.0);
        params.covariances[static_cast<size_t>(j)] =
            scatter / count + reg * Matrix::Identity(dim, dim);
        params.weights(j) = counts[static_cast<size_t>(j)] / static_cast<double>(X.rows());
    }
    return params;
}

struct GmmRun {
    GmmParams params;
    Matrix resp;
    double total_nll = 0.0;
    int iterations = 0;
    std::vector<double> trace;
};

GmmRun run_em(const Matrix& X, const Dataset& data, int k, const MethodConfig& config, double reg,
              std::uint64_t run_index) {
    GmmRun res;
    res.params = init_from_kmeans(X, data, k, config, reg, run_index);

    EStep e = e_step(X, res.params);
    double prev_nll = -e.total_ll;
    for (int it = 0; it < config.max_iter; ++it) {
        m_step(X, e.resp, reg, res.params);
        e = e_step(X, res.params);
        const double nll = -e.total_ll;
        res.trace.push_back(nll);
        ++res.iterations;
        const bool converged = relative_change(prev_nll, nll) < config.tol;
        prev_nll = nll;
        if (converged) break;
    }
    res.total_nll = prev_nll;
    res.resp = std::move(e.resp);
    return res;
}

}  // namespace

ClusteringOutcome gmm_em(const Dataset& data, int k, const MethodConfig& config) {
    const Matrix& X = data.values();
    detail::validate_fit_args(config, k, X.rows());
    if (config.covariance_reg < 0.0) throw DataError("covariance_reg must be nonnegative");
    const double reg = resolve_covariance_reg(X, config.covariance_reg);

    GmmRun best;
    bool have_best = false;
    for (int run = 0; run < config.n_init; ++run) {
        GmmRun candidate = run_em(X, data, k, config, reg, static_cast<std::uint64_t>(run));
        if (!have_best || candidate.total_nll < best.total_nll) {
            best = std::move(candidate);
            have_best = true;
        }
    }

    ClusteringOutcome out;
    out.k = k;
    out.weights = std::move(best.params.weights);
    out.centroids = std::move(best.params.means);
    out.covariances = std::move(best.params.covariances);
    out.heterogeneity = best.total_nll;
    out.iterations = best.iterations;
    out.objective_trace = std::move(best.trace);
    out.hard_labels.resize(static_cast<size_t>(X.rows()));
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        Eigen::Index arg = 0;
        best.resp.row(i).maxCoeff(&arg);
        out.hard_labels[static_cast<size_t>(i)] = static_cast<int>(arg);
    }
    out.memberships = std::move(best.resp);
    return out;
}

}  // namespace elbowsig
