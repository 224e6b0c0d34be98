#pragma once

#include "elbowsig/common.hpp"
#include "elbowsig/dataset.hpp"
#include "elbowsig/rng.hpp"

#include <string>
#include <vector>

namespace elbowsig {

enum class Method { Agglomerative, KMeans, Fcm, Gmm };

std::string method_name(Method m);
Method method_from_name(const std::string& name);

struct MethodConfig {
    Method method = Method::KMeans;
    double fuzzifier = 2.0;       // FCM only; must be > 1
    int max_iter = 300;
    double tol = 1e-6;            // relative objective-change stop rule
    int n_init = 1;
    double covariance_reg = 0.0;  // GMM; 0 resolves to 1e-6 * mean feature variance
    RngSpec rng;
};

/// One (method, k) fit. Fields beyond k/hard_labels/heterogeneity are
/// populated only where the method defines them.
struct ClusteringOutcome {
    int k = 0;
    std::vector<int> hard_labels;       // argmax labels for FCM/GMM
    Matrix centroids;                   // k x D centroids/means
    Matrix memberships;                 // N x k (FCM memberships; GMM responsibilities)
    Vector weights;                     // k (gmm mixing weights)
    std::vector<Matrix> covariances;    // k of D x D (gmm)
    double heterogeneity = 0.0;         // H_k; >= 0 except GMM (total NLL)
    int iterations = 0;
    std::vector<double> objective_trace;  // per-iteration objective of the winning run
};

/// Agglomerative merge tree. Leaves are clusters 0..N-1; merge t creates
/// cluster N+t. Heights are the Ward cost (increase in total within-cluster
/// sum of squares) of each merge and are non-decreasing.
struct Dendrogram {
    struct Merge {
        int left = 0;
        int right = 0;
        double height = 0.0;
    };
    int n_points = 0;
    std::vector<Merge> merges;  // size N-1
};

/// Greedy Ward linkage (Lance-Williams update, Euclidean metric).
Dendrogram ward_dendrogram(const Dataset& data);

/// Partition obtained by undoing the last k-1 merges; labels are compact,
/// in [0, k), numbered by first point occurrence.
std::vector<int> cut_dendrogram(const Dendrogram& dendro, int k);

/// Sum of squared distances from each point to its cluster mean. Labels in
/// [0, k); every cluster must be non-empty. Cluster means are written to
/// centroids_out when provided (k x D).
double partition_inertia(const Matrix& points, const std::vector<int>& labels, int k,
                         Matrix* centroids_out = nullptr);

/// Lloyd iterations from k-means++ seeding; best of n_init runs by inertia.
/// Empty clusters are repaired by relocating the centroid to the point
/// farthest from its current centroid.
ClusteringOutcome kmeans(const Dataset& data, int k, const MethodConfig& config);

/// Fuzzy c-means with fuzzifier m > 1. A point coincident with a centroid
/// receives crisp membership there.
ClusteringOutcome fcm(const Dataset& data, int k, const MethodConfig& config);

/// Full-covariance EM initialized from a k-means fit of the same data;
/// every covariance update adds covariance_reg * I. Heterogeneity is the
/// total negative log-likelihood.
ClusteringOutcome gmm_em(const Dataset& data, int k, const MethodConfig& config);

struct HeterogeneitySequence {
    Method method = Method::KMeans;
    std::vector<int> k_values;  // 1..k_max+1
    std::vector<double> H;      // aligned with k_values
};

/// H_k for k = 1..k_max+1 (the extra point makes delta_{k_max} computable).
/// Agglomerative builds one dendrogram and cuts it at every k; iterative
/// methods are fitted per k, one derived RNG stream each.
HeterogeneitySequence heterogeneity_sequence(const Dataset& data,
                                             const MethodConfig& config, int k_max);

}  // namespace elbowsig
