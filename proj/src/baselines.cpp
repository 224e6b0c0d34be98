#include "elbowsig/baselines.hpp"

#include "elbowsig/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace elbowsig {
namespace {

/// Relabel to the non-empty clusters, numbered by first occurrence; returns
/// the number of clusters actually used.
int compact_labels(std::vector<int>& labels) {
    std::vector<int> remap;
    std::vector<int> out(labels.size());
    for (size_t i = 0; i < labels.size(); ++i) {
        const int label = labels[i];
        auto it = std::find(remap.begin(), remap.end(), label);
        if (it == remap.end()) {
            remap.push_back(label);
            it = remap.end() - 1;
        }
        out[i] = static_cast<int>(it - remap.begin());
    }
    labels = std::move(out);
    return static_cast<int>(remap.size());
}

std::vector<std::vector<int>> backend_partitions(const Dataset& data, const MethodConfig& config,
                                                 int k_min, int k_max) {
    std::vector<std::vector<int>> partitions;
    partitions.reserve(static_cast<size_t>(k_max - k_min) + 1);
    if (config.method == Method::Agglomerative) {
        const Dendrogram dendro = ward_dendrogram(data);
        for (int k = k_min; k <= k_max; ++k) partitions.push_back(cut_dendrogram(dendro, k));
        return partitions;
    }
    // Same shared-stream convention as heterogeneity_sequence: seeding draws
    // coincide across k, so consecutive partitions stay nested in practice.
    for (int k = k_min; k <= k_max; ++k) {
        ClusteringOutcome outcome;
        switch (config.method) {
            case Method::KMeans: outcome = kmeans(data, k, config); break;
            case Method::Fcm: outcome = fcm(data, k, config); break;
            case Method::Gmm: outcome = gmm_em(data, k, config); break;
            case Method::Agglomerative: break;  // handled above
        }
        partitions.push_back(std::move(outcome.hard_labels));
    }
    return partitions;
}

struct Scatter {
    Matrix centroids;            // k x D
    std::vector<double> sizes;   // k
    double within = 0.0;         // sum of squared distances to centroids
    double between = 0.0;        // sum_c n_c ||mu_c - mu||^2
    int k = 0;
};

Scatter cluster_scatter(const Matrix& X, const std::vector<int>& labels) {
    std::vector<int> compacted = labels;
    const int k = compact_labels(compacted);
    Scatter s;
    s.k = k;
    s.within = partition_inertia(X, compacted, k, &s.centroids);
    s.sizes.assign(static_cast<size_t>(k), 0.0);
    for (int label : compacted) s.sizes[static_cast<size_t>(label)] += 1.0;
    const Eigen::RowVectorXd grand_mean = X.colwise().mean();
    for (int c = 0; c < k; ++c)
        s.between += s.sizes[static_cast<size_t>(c)] *
                     (s.centroids.row(c) - grand_mean).squaredNorm();
    return s;
}

}  // namespace

std::string validity_index_name(ValidityIndex index) {
    switch (index) {
        case ValidityIndex::CalinskiHarabasz: return "ch";
        case ValidityIndex::DaviesBouldin: return "db";
        case ValidityIndex::Silhouette: return "silhouette";
    }
    throw std::logic_error("invalid ValidityIndex enum value");
}

ValidityIndex validity_index_from_name(const std::string& name) {
    if (name == "ch") return ValidityIndex::CalinskiHarabasz;
    if (name == "db") return ValidityIndex::DaviesBouldin;
    if (name == "silhouette") return ValidityIndex::Silhouette;
    throw DataError("unknown validity index '" + name + "' (expected ch, db, or silhouette)");
}

std::vector<double> inertia_curve(const Dataset& data, const MethodConfig& config, int k_max) {
    if (k_max < 1) throw DataError("k_max must be positive, got " + std::to_string(k_max));
    if (static_cast<Eigen::Index>(k_max) > data.n_rows())
        throw DataError("k_max = " + std::to_string(k_max) + " exceeds N = " +
                        std::to_string(data.n_rows()));
    const Matrix& X = data.values();
    const std::vector<std::vector<int>> partitions = backend_partitions(data, config, 1, k_max);
    std::vector<double> w(static_cast<size_t>(k_max));
    for (int k = 1; k <= k_max; ++k) {
        std::vector<int> labels = partitions[static_cast<size_t>(k - 1)];
        const int used = compact_labels(labels);
        w[static_cast<size_t>(k - 1)] = partition_inertia(X, labels, used);
    }
    return w;
}

GapResult gap_from_w(const std::vector<double>& w_data, const Matrix& w_refs) {
    const int k_max = static_cast<int>(w_data.size());
    if (k_max < 2) throw DataError("gap statistic needs k_max >= 2");
    if (w_refs.cols() != k_max || w_refs.rows() < 2)
        throw DataError("reference dispersion matrix must be n_ref x k_max with n_ref >= 2");
    const Eigen::Index n_ref = w_refs.rows();

    GapResult res;
    res.k_values.resize(static_cast<size_t>(k_max));
    std::iota(res.k_values.begin(), res.k_values.end(), 1);
    res.gap.resize(static_cast<size_t>(k_max));
    res.s_k.resize(static_cast<size_t>(k_max));

    for (int kj = 0; kj < k_max; ++kj) {
        if (!(w_data[static_cast<size_t>(kj)] > 0.0))
            throw NumericError("within-cluster dispersion of the data is zero at k=" +
                               std::to_string(kj + 1) + "; ln W is undefined");
        Vector log_w(n_ref);
        for (Eigen::Index r = 0; r < n_ref; ++r) {
            if (!(w_refs(r, kj) > 0.0))
                throw NumericError("within-cluster dispersion of reference " + std::to_string(r) +
                                   " is zero at k=" + std::to_string(kj + 1) +
                                   "; ln W is undefined");
            log_w(r) = std::log(w_refs(r, kj));
        }
        const double mean_log = log_w.mean();
        const double variance = (log_w.array() - mean_log).square().mean();  // population
        res.gap[static_cast<size_t>(kj)] = mean_log - std::log(w_data[static_cast<size_t>(kj)]);
        res.s_k[static_cast<size_t>(kj)] =
            std::sqrt(variance) * std::sqrt(1.0 + 1.0 / static_cast<double>(n_ref));
    }

    res.k_hat_rule1 = k_max;
    res.rule1_defaulted = true;
    for (int kj = 0; kj + 1 < k_max; ++kj) {
        if (res.gap[static_cast<size_t>(kj)] >=
            res.gap[static_cast<size_t>(kj) + 1] - res.s_k[static_cast<size_t>(kj) + 1]) {
            res.k_hat_rule1 = kj + 1;
            res.rule1_defaulted = false;
            break;
        }
    }
    const auto max_it = std::max_element(res.gap.begin(), res.gap.end());
    res.k_hat_rule2 = static_cast<int>(max_it - res.gap.begin()) + 1;
    return res;
}

GapResult gap_statistic(const Dataset& data, const MethodConfig& config, int k_max, int n_ref,
                        ReferenceType reference_type, const RngSpec& rng) {
    if (n_ref < 2) throw DataError("n_ref must be at least 2, got " + std::to_string(n_ref));
    const std::vector<double> w_data = inertia_curve(data, config, k_max);

    Matrix w_refs(n_ref, k_max);
    parallel_for(static_cast<size_t>(n_ref), [&](size_t r) {
        const RngSpec gen_spec = rng.substream(2 * static_cast<std::uint64_t>(r));
        const RngSpec fit_spec = rng.substream(2 * static_cast<std::uint64_t>(r) + 1);
        try {
            const Dataset reference = reference_type == ReferenceType::BoundingBoxUniform
                                          ? gen_bbox_uniform(data, gen_spec)
                                          : gen_pca_uniform(data, gen_spec);
            MethodConfig fit_config = config;
            fit_config.rng = fit_spec;
            const std::vector<double> w = inertia_curve(reference, fit_config, k_max);
            for (int kj = 0; kj < k_max; ++kj)
                w_refs(static_cast<Eigen::Index>(r), kj) = w[static_cast<size_t>(kj)];
        } catch (const DataError& e) {
            throw DataError("gap reference " + std::to_string(r) + ": " + e.what());
        } catch (const NumericError& e) {
            throw NumericError("gap reference " + std::to_string(r) + ": " + e.what());
        }
    });
    return gap_from_w(w_data, w_refs);
}

double calinski_harabasz(const Dataset& data, const std::vector<int>& labels) {
    const Matrix& X = data.values();
    const Scatter s = cluster_scatter(X, labels);
    if (s.k < 2) throw DataError("Calinski-Harabasz requires at least 2 non-empty clusters");
    const double n = static_cast<double>(X.rows());
    if (s.within == 0.0) {
        if (s.between == 0.0)
            throw NumericError("Calinski-Harabasz undefined: zero between- and "
                               "within-cluster scatter (all points identical)");
        return std::numeric_limits<double>::infinity();
    }
    return (s.between / static_cast<double>(s.k - 1)) / (s.within / (n - static_cast<double>(s.k)));
}

double davies_bouldin(const Dataset& data, const std::vector<int>& labels) {
    const Matrix& X = data.values();
    std::vector<int> compacted = labels;
    const int k = compact_labels(compacted);
    if (k < 2) throw DataError("Davies-Bouldin requires at least 2 non-empty clusters");

    Matrix centroids;
    partition_inertia(X, compacted, k, &centroids);
    std::vector<double> dispersion(static_cast<size_t>(k), 0.0);
    std::vector<double> sizes(static_cast<size_t>(k), 0.0);
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        const int c = compacted[static_cast<size_t>(i)];
        dispersion[static_cast<size_t>(c)] += (X.row(i) - centroids.row(c)).norm();
        sizes[static_cast<size_t>(c)] += 1.0;
    }
    for (int c = 0; c < k; ++c) dispersion[static_cast<size_t>(c)] /= sizes[static_cast<size_t>(c)];

    double total = 0.0;
    for (int i = 0; i < k; ++i) {
        double worst = 0.0;
        for (int j = 0; j < k; ++j) {
            if (j == i) continue;
            const double separation = (centroids.row(i) - centroids.row(j)).norm();
            const double closeness = dispersion[static_cast<size_t>(i)] +
                                     dispersion[static_cast<size_t>(j)];
            double ratio;
            if (separation > 0.0)
                ratio = closeness / separation;
            else
                ratio = closeness == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
            worst = std::max(worst, ratio);
        }
        total += worst;
    }
    return total / static_cast<double>(k);
}

double silhouette(const Dataset& data, const std::vector<int>& labels) {
    const Matrix& X = data.values();
    const Eigen::Index n = X.rows();
    if (n < 3) throw DataError("silhouette requires N >= 3");
    std::vector<int> compacted = labels;
    const int k = compact_labels(compacted);
    if (k < 2) throw DataError("silhouette requires at least 2 non-empty clusters");

    std::vector<double> sizes(static_cast<size_t>(k), 0.0);
    for (int label : compacted) sizes[static_cast<size_t>(label)] += 1.0;

    double total = 0.0;
    std::vector<double> mean_dist(static_cast<size_t>(k));
    for (Eigen::Index i = 0; i < n; ++i) {
        const int own = compacted[static_cast<size_t>(i)];
        if (sizes[static_cast<size_t>(own)] <= 1.0) continue;  // singleton: s(i) = 0

        std::fill(mean_dist.begin(), mean_dist.end(), 0.0);
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == i) continue;
            mean_dist[static_cast<size_t>(compacted[static_cast<size_t>(j)])] +=
                (X.row(i) - X.row(j)).norm();
        }
        double b = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
            if (c == own) continue;
            b = std::min(b, mean_dist[static_cast<size_t>(c)] / sizes[static_cast<size_t>(c)]);
        }
        const double a = mean_dist[static_cast<size_t>(own)] /
                         (sizes[static_cast<size_t>(own)] - 1.0);
        const double denom = std::max(a, b);
        total += denom > 0.0 ? (b - a) / denom : 0.0;
    }
    return total / static_cast<double>(n);
}

IndexCurve index_curve(const Dataset& data, const MethodConfig& config, int k_max,
                       ValidityIndex index) {
    if (k_max < 2) throw DataError("index scan needs k_max >= 2");
    if (static_cast<Eigen::Index>(k_max) > data.n_rows())
        throw DataError("k_max = " + std::to_string(k_max) + " exceeds N = " +
                        std::to_string(data.n_rows()));

    IndexCurve curve;
    curve.index = index;
    const std::vector<std::vector<int>> partitions = backend_partitions(data, config, 2, k_max);
    for (int k = 2; k <= k_max; ++k) {
        const std::vector<int>& labels = partitions[static_cast<size_t>(k - 2)];
        double score = 0.0;
        try {
            switch (index) {
                case ValidityIndex::CalinskiHarabasz: score = calinski_harabasz(data, labels); break;
                case ValidityIndex::DaviesBouldin: score = davies_bouldin(data, labels); break;
                case ValidityIndex::Silhouette: score = silhouette(data, labels); break;
            }
        } catch (const DataError& e) {
            throw DataError("index scan failed at k=" + std::to_string(k) + ": " + e.what());
        } catch (const NumericError& e) {
            throw NumericError("index scan failed at k=" + std::to_string(k) + ": " + e.what());
        }
        curve.k_values.push_back(k);
        curve.scores.push_back(score);
    }

    size_t best = 0;
    for (size_t j = 1; j < curve.scores.size(); ++j) {
        if (index == ValidityIndex::DaviesBouldin ? curve.scores[j] < curve.scores[best]
                                                  : curve.scores[j] > curve.scores[best])
            best = j;
    }
    curve.k_hat = curve.k_values[best];
    return curve;
}

}  // namespace elbowsig
