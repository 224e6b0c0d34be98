#pragma once

#include "elbowsig/clustering.hpp"
#include "elbowsig/reference.hpp"

#include <string>
#include <vector>

namespace elbowsig {

struct GapResult {
    std::vector<int> k_values;    // 1..k_max
    std::vector<double> gap;
    std::vector<double> s_k;      // standard-error estimates
    int k_hat_rule1 = 1;          // smallest k with Gap(k) >= Gap(k+1) - s_{k+1}
    int k_hat_rule2 = 1;          // argmax_k Gap(k)
    bool rule1_defaulted = false; // no k satisfied rule I; k_max returned
};

/// Within-cluster inertia W_k of the backend's hard partitions for
/// k = 1..k_max (FCM/GMM partitions come from argmax labels, compacted to the
/// non-empty clusters). Iterative fits draw from config.rng.substream(k),
/// matching heterogeneity_sequence.
std::vector<double> inertia_curve(const Dataset& data, const MethodConfig& config, int k_max);

/// Gap statistic from precomputed dispersions: w_data over k = 1..k_max and
/// one reference per row of w_refs (n_ref x k_max).
GapResult gap_from_w(const std::vector<double>& w_data, const Matrix& w_refs);

/// Tibshirani-style gap statistic: Gap(k) = mean_r ln W_k^(r) - ln W_k with
/// s_k = sd_r(ln W_k^(r)) * sqrt(1 + 1/N_R). Reference r draws generation and
/// fit streams from rng.substream(2r) / rng.substream(2r+1).
GapResult gap_statistic(const Dataset& data, const MethodConfig& config, int k_max, int n_ref,
                        ReferenceType reference_type, const RngSpec& rng);

enum class ValidityIndex { CalinskiHarabasz, DaviesBouldin, Silhouette };

std::string validity_index_name(ValidityIndex index);  // "ch" / "db" / "silhouette"
ValidityIndex validity_index_from_name(const std::string& name);

/// CH = [B/(k-1)] / [W/(N-k)]; labels must form >= 2 non-empty clusters.
/// Zero within-cluster scatter with positive between-cluster scatter gives
/// +infinity; all points identical is an error.
double calinski_harabasz(const Dataset& data, const std::vector<int>& labels);

/// DB = mean_i max_{j != i} (s_i + s_j) / ||mu_i - mu_j||; the 0/0 case of
/// coincident centroids with zero dispersions scores 0.
double davies_bouldin(const Dataset& data, const std::vector<int>& labels);

/// Mean silhouette (b - a)/max(a, b); singleton clusters contribute 0.
double silhouette(const Dataset& data, const std::vector<int>& labels);

struct IndexCurve {
    ValidityIndex index = ValidityIndex::CalinskiHarabasz;
    std::vector<int> k_values;  // 2..k_max
    std::vector<double> scores;
    int k_hat = 2;              // argmax (CH, silhouette) or argmin (DB)
};

/// Scores the backend's partitions at k = 2..k_max (same partition sharing as
/// inertia_curve) and selects k_hat.
IndexCurve index_curve(const Dataset& data, const MethodConfig& config, int k_max,
                       ValidityIndex index);

}  // namespace elbowsig
