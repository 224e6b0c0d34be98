#pragma once

#include "elbowsig/baselines.hpp"
#include "elbowsig/inference.hpp"

#include <map>
#include <string>
#include <vector>

namespace elbowsig {

/// Mixture of M isotropic Gaussian components with centers placed uniformly
/// at random in [-box_halfwidth, box_halfwidth]^D.
struct BlobSpec {
    int n = 200;
    int d = 2;
    int components = 1;  // M
    double sigma_c = 1.0;
    double box_halfwidth = 10.0;
    RngSpec rng;
};

/// Generated data plus the generating component of each row. The labels are
/// diagnostics only and are never passed to the significance analysis.
struct LabeledDataset {
    Dataset data;
    std::vector<int> true_labels;
};

LabeledDataset gen_blobs(const BlobSpec& spec);

enum class UnstructuredKind { UniformBox01, GaussianIso };

/// i.i.d. rows from Uniform[0,1]^D or N(0, sigma^2 I).
Dataset gen_unstructured(int n, int d, UnstructuredKind kind, double sigma, const RngSpec& rng);

enum class GeneratorKind { Blobs, UniformBox01, GaussianIso };

/// Replicated-table experiment (Tables 2/4 shape). Replicate rep derives its
/// streams from rng.substream(rep): substream 0 generates the data, 1 drives
/// the analysis (ensemble + calibration), 2 the method fits, 3 any extra
/// baseline references.
struct TableDesign {
    int replicates = 100;
    GeneratorKind generator = GeneratorKind::Blobs;
    int n = 200;
    int d = 2;
    int components = 3;          // blobs only
    double sigma_c = 1.0;        // blobs only
    double box_halfwidth = 10.0; // blobs only
    double sigma = 1.0;          // GaussianIso only
    MethodConfig method;         // rng field ignored (derived per replicate)
    AnalyzeOptions analysis;     // rng field ignored (derived per replicate)
    bool run_baselines = true;
    RngSpec rng;
};

/// Fig.-1 style scaling sweep: per D, N_R uniform-[0,1]^D datasets and the
/// distribution of delta_{k_probe} per method.
struct ScalingDesign {
    int n = 30;
    int k_probe = 3;
    std::vector<Method> methods = {Method::KMeans, Method::Agglomerative, Method::Fcm};
    std::vector<int> d_grid = {8, 16, 32, 64, 128};
    int n_ref = 200;
    MethodConfig base_config;  // method field overridden per entry; rng ignored
    RngSpec rng;
};

struct ScalingRow {
    std::string method;
    int d = 0;
    double mean_delta = 0.0;
    double var_delta = 0.0;  // sample variance over references
};

struct ExperimentResult {
    std::map<std::string, std::string> design;  // configuration echo
    int k_max = 0;
    std::vector<std::string> row_labels;         // selector/criterion per counts row
    std::vector<std::vector<long>> counts;       // row x k tallies, k = 1..k_max
    int replicates_attempted = 0;
    int replicates_failed = 0;
    std::vector<std::string> failures;
    std::vector<ScalingRow> scaling;
    std::map<std::string, double> scaling_slopes;  // OLS slope of ln var vs ln D
};

/// Counts row labels: elbowsig_per_k, elbowsig_fdr, then (with baselines)
/// gap_rule1, gap_rule2, ch, db, silhouette. ElbowSig rows tally every
/// significant k, or k=1 when the set is empty; selector rows tally exactly
/// one k per successful replicate.
ExperimentResult run_table_experiment(const TableDesign& design);

ExperimentResult run_scaling_experiment(const ScalingDesign& design);

/// Flat "key = value" config files; '#' starts a comment, blank lines are
/// ignored, keys may not repeat.
std::map<std::string, std::string> parse_config_text(const std::string& text);
std::map<std::string, std::string> parse_config_file(const std::string& path);

/// "table" or "scaling" (the config's `experiment` key; defaults to table).
std::string design_kind(const std::map<std::string, std::string>& kv);

TableDesign table_design_from_config(const std::map<std::string, std::string>& kv);
ScalingDesign scaling_design_from_config(const std::map<std::string, std::string>& kv);

}  // namespace elbowsig
