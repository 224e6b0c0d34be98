#include "elbowsig/clustering.hpp"

#include "clustering_internal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace elbowsig {
namespace {

std::vector<int> assign_nearest(const Matrix& X, const Matrix& centroids) {
    const Eigen::Index n = X.rows();
    const Eigen::Index k = centroids.rows();
    std::vector<int> labels(static_cast<size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        int best = 0;
        double best_d = (X.row(i) - centroids.row(0)).squaredNorm();
        for (Eigen::Index j = 1; j < k; ++j) {
            const double dj = (X.row(i) - centroids.row(j)).squaredNorm();
            if (dj < best_d) {
                best_d = dj;
                best = static_cast<int>(j);
            }
        }
        labels[static_cast<size_t>(i)] = best;
    }
    return labels;
}

double min_inertia(const Matrix& X, const Matrix& centroids) {
    const Eigen::Index n = X.rows();
    const Eigen::Index k = centroids.rows();
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        double best = (X.row(i) - centroids.row(0)).squaredNorm();
        for (Eigen::Index j = 1; j < k; ++j)
            best = std::min(best, (X.row(i) - centroids.row(j)).squaredNorm());
        total += best;
    }
    return total;
}

/// Greedy k-means++: each new centroid is drawn from a small pool of
/// D^2-sampled candidates, keeping the one that lowers the potential most.
Matrix seed_kmeanspp(const Matrix& X, int k, RngStream& rng) {
    const Eigen::Index n = X.rows();
    Matrix centroids(k, X.cols());
    centroids.row(0) = X.row(static_cast<Eigen::Index>(rng.uniform_index(static_cast<size_t>(n))));
    if (k == 1) return centroids;

    // Sample proportionally to the squared distance to the nearest chosen
    // centroid; zero-mass points are never selected.
    const auto sample_d2 = [&](const Vector& d2, double total) {
        const double target = rng.uniform01() * total;
        Eigen::Index pick = -1;
        double cum = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (d2(i) <= 0.0) continue;
            pick = i;
            cum += d2(i);
            if (cum >= target) break;
        }
        return pick;
    };

    const int n_candidates = 2 + static_cast<int>(std::log(static_cast<double>(k)));
    Vector d2 = (X.rowwise() - centroids.row(0)).rowwise().squaredNorm();
    for (int j = 1; j < k; ++j) {
        const double total = d2.sum();
        if (total <= 0.0) {
            const auto pick = static_cast<Eigen::Index>(rng.uniform_index(static_cast<size_t>(n)));
            centroids.row(j) = X.row(pick);
            continue;
        }
        Eigen::Index best_pick = -1;
        double best_pot = std::numeric_limits<double>::infinity();
        Vector best_d2;
        for (int c = 0; c < n_candidates; ++c) {
            const Eigen::Index pick = sample_d2(d2, total);
            Vector cand_d2 = d2.cwiseMin((X.rowwise() - X.row(pick)).rowwise().squaredNorm());
            const double pot = cand_d2.sum();
            if (pot < best_pot) {
                best_pot = pot;
                best_pick = pick;
                best_d2 = std::move(cand_d2);
            }
        }
        centroids.row(j) = X.row(best_pick);
        d2 = std::move(best_d2);
    }
    return centroids;
}

/// Give every empty cluster the unclaimed point farthest from its assigned
/// centroid; the donor cluster must retain at least one member.
void repair_empty_clusters(const Matrix& X, Matrix& centroids, std::vector<int>& labels, int k) {
    const Eigen::Index n = X.rows();
    std::vector<Eigen::Index> counts(static_cast<size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) ++counts[static_cast<size_t>(labels[static_cast<size_t>(i)])];
    if (std::none_of(counts.begin(), counts.end(), [](Eigen::Index c) { return c == 0; })) return;

    Vector dist(n);
    for (Eigen::Index i = 0; i < n; ++i)
        dist(i) = (X.row(i) - centroids.row(labels[static_cast<size_t>(i)])).squaredNorm();

    std::vector<bool> taken(static_cast<size_t>(n), false);
    for (int c = 0; c < k; ++c) {
        if (counts[static_cast<size_t>(c)] != 0) continue;
        Eigen::Index best = -1;
        double best_d = -1.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (taken[static_cast<size_t>(i)]) continue;
            if (counts[static_cast<size_t>(labels[static_cast<size_t>(i)])] <= 1) continue;
            if (dist(i) > best_d) {
                best_d = dist(i);
                best = i;
            }
        }
        if (best < 0)
            throw NumericError("cannot repair empty cluster " + std::to_string(c) +
                               ": no donatable point");
        --counts[static_cast<size_t>(labels[static_cast<size_t>(best)])];
        labels[static_cast<size_t>(best)] = c;
        counts[static_cast<size_t>(c)] = 1;
        centroids.row(c) = X.row(best);
        taken[static_cast<size_t>(best)] = true;
    }
}

struct LloydResult {
    Matrix centroids;
    std::vector<int> labels;
    double inertia = 0.0;
    int iterations = 0;
    std::vector<double> trace;
};

LloydResult run_lloyd(const Matrix& X, int k, const MethodConfig& config, RngStream& rng) {
    const Eigen::Index n = X.rows();
    LloydResult res;
    res.centroids = seed_kmeanspp(X, k, rng);

    std::vector<int> prev_labels;
    double prev_J = std::numeric_limits<double>::infinity();
    for (int it = 0; it < config.max_iter; ++it) {
        std::vector<int> labels = assign_nearest(X, res.centroids);
        repair_empty_clusters(X, res.centroids, labels, k);

        Matrix sums = Matrix::Zero(k, X.cols());
        std::vector<double> counts(static_cast<size_t>(k), 0.0);
        for (Eigen::Index i = 0; i < n; ++i) {
            sums.row(labels[static_cast<size_t>(i)]) += X.row(i);
            counts[static_cast<size_t>(labels[static_cast<size_t>(i)])] += 1.0;
        }
        for (int c = 0; c < k; ++c) res.centroids.row(c) = sums.row(c) / counts[static_cast<size_t>(c)];

        const double J = min_inertia(X, res.centroids);
        res.trace.push_back(J);
        ++res.iterations;

        const bool stable = !prev_labels.empty() && labels == prev_labels;
        prev_labels = std::move(labels);
        if (stable) break;
        if (it > 0 && relative_change(prev_J, J) < config.tol) break;
        prev_J = J;
    }

    res.labels = assign_nearest(X, res.centroids);
    res.inertia = res.trace.back();
    return res;
}

}  // namespace

ClusteringOutcome kmeans(const Dataset& data, int k, const MethodConfig& config) {
    const Matrix& X = data.values();
    detail::validate_fit_args(config, k, X.rows());

    RngStream rng(config.rng);
    LloydResult best;
    bool have_best = false;
    for (int run = 0; run < config.n_init; ++run) {
        LloydResult candidate = run_lloyd(X, k, config, rng);
        if (!have_best || candidate.inertia < best.inertia) {
            best = std::move(candidate);
            have_best = true;
        }
    }

    ClusteringOutcome out;
    out.k = k;
    out.hard_labels = std::move(best.labels);
    out.centroids = std::move(best.centroids);
    out.heterogeneity = best.inertia;
    out.iterations = best.iterations;
    out.objective_trace = std::move(best.trace);
    return out;
}

}  // namespace elbowsig
