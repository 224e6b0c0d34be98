#pragma once

#include "elbowsig/elbow.hpp"
#include "elbowsig/reference.hpp"

#include <string>
#include <vector>

namespace elbowsig {

/// Empirical p-values over k = 2..k_max; each is an exact multiple of 1/N_R.
struct PValueSequence {
    std::vector<int> k_values;
    std::vector<double> p;
};

/// Appendix-style subsampling calibration of the per-k significance cut.
struct ThresholdCalibration {
    double q1 = 0.05;
    int s_sig = 50;
    double f_sel = 0.5;
    std::vector<int> k_values;         // 2..k_max
    std::vector<double> p_thr_per_k;   // aligned with k_values
    double p_sig = 1.0;                // min over k of p_thr_per_k
};

struct AnalyzeOptions {
    int k_max = 10;
    int n_ref = 200;
    ReferenceType reference_type = ReferenceType::BoundingBoxUniform;
    double q1 = 0.05;   // per-k familywise level
    double q2 = 0.05;   // BH FDR level
    int s_sig = 50;     // calibration repetitions
    double f_sel = 0.5; // calibration subsample fraction
    RngSpec rng;        // substream 1 -> ensemble, substream 2 -> calibration
};

struct SignificanceReport {
    std::string method;
    std::string reference_type;
    int n_ref = 0;
    int k_max = 0;
    RngSpec seeds;  // master stream of the analysis
    double q2 = 0.05;
    HeterogeneitySequence h_data;
    ElbowSequence delta_data;
    PValueSequence p_values;
    ThresholdCalibration calibration;
    std::vector<int> per_k_significant;        // {k : p_k < p_sig}
    std::vector<int> fdr_significant;          // BH rejections at level q2
    std::vector<int> monotonicity_violations;  // k with H_{k+1} > H_k
};

/// p_k = (1/N_R) * #{r : delta_k^(r) >= delta_k^data}; ties count as
/// exceedances and values of 0 are possible (no smoothing).
PValueSequence empirical_pvalues(const ElbowSequence& delta_data,
                                 const ReferenceEnsemble& ensemble);

/// For each k and repetition s: draw floor(f_sel*N_R) references without
/// replacement, take the q1 lower empirical quantile (ceil(q1*N_sel)-th order
/// statistic) of their leave-one-out null p-values, minimize over s, then over
/// k. Repetition s draws from rng.substream(s), one subsample per k in k
/// order.
ThresholdCalibration calibrate_threshold(const ReferenceEnsemble& ensemble, double q1, int s_sig,
                                         double f_sel, const RngSpec& rng);

/// Benjamini-Hochberg step-up at level q2; returns the rejected k ascending.
std::vector<int> bh_fdr(const PValueSequence& p_values, double q2);

/// Full procedure: data heterogeneity/elbow curves, null ensemble, empirical
/// p-values, threshold calibration, per-k and FDR significance sets.
SignificanceReport analyze(const Dataset& data, const MethodConfig& config,
                           const AnalyzeOptions& options);

/// Same as analyze but against a prebuilt ensemble (k_max, n_ref and
/// reference_type are taken from the ensemble).
SignificanceReport analyze_against(const Dataset& data, const MethodConfig& config,
                                   const ReferenceEnsemble& ensemble,
                                   const AnalyzeOptions& options);

}  // namespace elbowsig
