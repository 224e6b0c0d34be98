#include "elbowsig/clustering.hpp"

#include "clustering_internal.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace elbowsig {

std::string method_name(Method m) {
    switch (m) {
        case Method::Agglomerative: return "agglomerative";
        case Method::KMeans: return "kmeans";
        case Method::Fcm: return "fcm";
        case Method::Gmm: return "gmm";
    }
    throw std::logic_error("invalid Method enum value");
}

Method method_from_name(const std::string& name) {
    if (name == "agglomerative") return Method::Agglomerative;
    if (name == "kmeans") return Method::KMeans;
    if (name == "fcm") return Method::Fcm;
    if (name == "gmm") return Method::Gmm;
    throw DataError("unknown clustering method '" + name +
                    "' (expected agglomerative, kmeans, fcm, or gmm)");
}

double partition_inertia(const Matrix& points, const std::vector<int>& labels, int k,
                         Matrix* centroids_out) {
    const Eigen::Index n = points.rows();
    if (static_cast<Eigen::Index>(labels.size()) != n)
        throw DataError("labels length " + std::to_string(labels.size()) +
                        " does not match point count " + std::to_string(n));
    if (k < 1) throw DataError("cluster count must be positive, got " + std::to_string(k));

    Matrix centroids = Matrix::Zero(k, points.cols());
    std::vector<Eigen::Index> counts(static_cast<size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
        const int c = labels[static_cast<size_t>(i)];
        if (c < 0 || c >= k)
            throw DataError("label " + std::to_string(c) + " at row " + std::to_string(i) +
                            " is outside [0, " + std::to_string(k) + ")");
        centroids.row(c) += points.row(i);
        ++counts[static_cast<size_t>(c)];
    }
    for (int c = 0; c < k; ++c) {
        if (counts[static_cast<size_t>(c)] == 0)
            throw DataError("cluster " + std::to_string(c) + " has no points");
        centroids.row(c) /= static_cast<double>(counts[static_cast<size_t>(c)]);
    }

    double sse = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        sse += (points.row(i) - centroids.row(labels[static_cast<size_t>(i)])).squaredNorm();
    if (centroids_out != nullptr) *centroids_out = std::move(centroids);
    return sse;
}

std::vector<int> cut_dendrogram(const Dendrogram& dendro, int k) {
    const int n = dendro.n_points;
    if (k < 1 || k > n)
        throw DataError("cut at k=" + std::to_string(k) + " is outside [1, " +
                        std::to_string(n) + "]");
    if (static_cast<int>(dendro.merges.size()) != n - 1)
        throw DataError("dendrogram with " + std::to_string(n) + " points must have " +
                        std::to_string(n - 1) + " merges, found " +
                        std::to_string(dendro.merges.size()));

    // Union-find over node ids 0..2N-2; applying the first N-k merges leaves
    // exactly k components.
    std::vector<int> parent(static_cast<size_t>(2 * n - 1));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&parent](int x) {
        while (parent[static_cast<size_t>(x)] != x) {
            parent[static_cast<size_t>(x)] = parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
            x = parent[static_cast<size_t>(x)];
        }
        return x;
    };
    for (int t = 0; t < n - k; ++t) {
        const Dendrogram::Merge& m = dendro.merges[static_cast<size_t>(t)];
        const int node = n + t;
        parent[static_cast<size_t>(find(m.left))] = node;
        parent[static_cast<size_t>(find(m.right))] = node;
    }

    // Compact labels numbered by first point occurrence.
    std::vector<int> labels(static_cast<size_t>(n), -1);
    std::vector<int> root_label(static_cast<size_t>(2 * n - 1), -1);
    int next = 0;
    for (int i = 0; i < n; ++i) {
        const int root = find(i);
        if (root_label[static_cast<size_t>(root)] < 0) root_label[static_cast<size_t>(root)] = next++;
        labels[static_cast<size_t>(i)] = root_label[static_cast<size_t>(root)];
    }
    return labels;
}

HeterogeneitySequence heterogeneity_sequence(const Dataset& data, const MethodConfig& config,
                                             int k_max) {
    if (k_max < 2) throw DataError("k_max must be at least 2, got " + std::to_string(k_max));
    const Eigen::Index n = data.n_rows();
    if (static_cast<Eigen::Index>(k_max) + 1 > n)
        throw DataError("k_max+1 = " + std::to_string(k_max + 1) +
                        " clusters exceed the N = " + std::to_string(n) + " available points");

    HeterogeneitySequence seq;
    seq.method = config.method;
    seq.k_values.resize(static_cast<size_t>(k_max) + 1);
    std::iota(seq.k_values.begin(), seq.k_values.end(), 1);
    seq.H.resize(static_cast<size_t>(k_max) + 1);

    if (config.method == Method::Agglomerative) {
        const Dendrogram dendro = ward_dendrogram(data);
        for (int k = 1; k <= k_max + 1; ++k) {
            const std::vector<int> labels = cut_dendrogram(dendro, k);
            seq.H[static_cast<size_t>(k - 1)] = partition_inertia(data.values(), labels, k);
        }
        return seq;
    }

    // Every k is fitted from the same stream, so the k-means++-style seeding
    // draws coincide across k: the k+1 initialization extends the k one rather
    // than resampling it. That keeps the optimization error of consecutive
    // H_k's correlated, which the second difference in delta then cancels.
    for (int k = 1; k <= k_max + 1; ++k) {
        try {
            ClusteringOutcome outcome;
            switch (config.method) {
                case Method::KMeans: outcome = kmeans(data, k, config); break;
                case Method::Fcm: outcome = fcm(data, k, config); break;
                case Method::Gmm: outcome = gmm_em(data, k, config); break;
                case Method::Agglomerative: throw std::logic_error("handled above");
            }
            seq.H[static_cast<size_t>(k - 1)] = outcome.heterogeneity;
        } catch (const DataError& e) {
            throw DataError("heterogeneity fit failed at k=" + std::to_string(k) + ": " + e.what());
        } catch (const NumericError& e) {
            throw NumericError("heterogeneity fit failed at k=" + std::to_string(k) + ": " +
                               e.what());
        }
    }
    return seq;
}

namespace detail {

void validate_fit_args(const MethodConfig& config, int k, Eigen::Index n_points) {
    if (k < 1 || static_cast<Eigen::Index>(k) > n_points)
        throw DataError("k=" + std::to_string(k) + " is outside [1, N=" +
                        std::to_string(n_points) + "]");
    if (config.max_iter < 1)
        throw DataError("max_iter must be positive, got " + std::to_string(config.max_iter));
    if (config.tol < 0.0) throw DataError("tol must be nonnegative");
    if (config.n_init < 1)
        throw DataError("n_init must be positive, got " + std::to_string(config.n_init));
}

}  // namespace detail

}  // namespace elbowsig
