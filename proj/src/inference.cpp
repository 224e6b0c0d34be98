#include "elbowsig/inference.hpp"

#include "elbowsig/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace elbowsig {

PValueSequence empirical_pvalues(const ElbowSequence& delta_data,
                                 const ReferenceEnsemble& ensemble) {
    if (delta_data.k_values != ensemble.k_values)
        throw DataError("observed elbow k grid does not match the ensemble grid");
    const Eigen::Index n_ref = ensemble.delta_matrix.rows();

    PValueSequence out;
    out.k_values = delta_data.k_values;
    out.p.resize(delta_data.delta.size());
    for (size_t j = 0; j < delta_data.delta.size(); ++j) {
        const double observed = delta_data.delta[j];
        Eigen::Index exceedances = 0;
        for (Eigen::Index r = 0; r < n_ref; ++r)
            if (ensemble.delta_matrix(r, static_cast<Eigen::Index>(j)) >= observed) ++exceedances;
        out.p[j] = static_cast<double>(exceedances) / static_cast<double>(n_ref);
    }
    return out;
}

ThresholdCalibration calibrate_threshold(const ReferenceEnsemble& ensemble, double q1, int s_sig,
                                         double f_sel, const RngSpec& rng) {
    const Eigen::Index n_ref = ensemble.delta_matrix.rows();
    if (n_ref < 10)
        throw DataError("calibration requires N_R >= 10, got " + std::to_string(n_ref));
    if (!(q1 > 0.0 && q1 < 1.0)) throw DataError("q1 must lie in (0, 1)");
    if (s_sig < 1) throw DataError("S_sig must be positive, got " + std::to_string(s_sig));
    if (!(f_sel > 0.0 && f_sel <= 1.0)) throw DataError("f_sel must lie in (0, 1]");
    const size_t n_sel = static_cast<size_t>(std::floor(f_sel * static_cast<double>(n_ref)));
    if (n_sel < 1) throw DataError("f_sel * N_R must be at least 1");

    const size_t n_k = ensemble.k_values.size();

    // Leave-one-out null p-values p_k^(i) = #{r != i : delta^(r) >= delta^(i)}
    // / (N_R - 1), obtained for a whole column from one sort.
    Matrix loo(n_ref, static_cast<Eigen::Index>(n_k));
    for (size_t j = 0; j < n_k; ++j) {
        std::vector<double> sorted(static_cast<size_t>(n_ref));
        for (Eigen::Index r = 0; r < n_ref; ++r)
            sorted[static_cast<size_t>(r)] = ensemble.delta_matrix(r, static_cast<Eigen::Index>(j));
        std::sort(sorted.begin(), sorted.end());
        for (Eigen::Index r = 0; r < n_ref; ++r) {
            const double value = ensemble.delta_matrix(r, static_cast<Eigen::Index>(j));
            const auto first_ge = std::lower_bound(sorted.begin(), sorted.end(), value);
            const Eigen::Index count_ge = n_ref - (first_ge - sorted.begin());
            loo(r, static_cast<Eigen::Index>(j)) =
                static_cast<double>(count_ge - 1) / static_cast<double>(n_ref - 1);
        }
    }

    // Quantile rank: ceil(q1 * N_sel)-th order statistic, 1-indexed, clamped.
    size_t rank = static_cast<size_t>(std::ceil(q1 * static_cast<double>(n_sel)));
    rank = std::clamp<size_t>(rank, 1, n_sel);

    Matrix per_s(s_sig, static_cast<Eigen::Index>(n_k));
    parallel_for(static_cast<size_t>(s_sig), [&](size_t s) {
        RngStream stream(rng.substream(s));
        std::vector<double> values(n_sel);
        for (size_t j = 0; j < n_k; ++j) {
            const std::vector<size_t> subsample =
                sample_without_replacement(static_cast<size_t>(n_ref), n_sel, stream);
            for (size_t i = 0; i < n_sel; ++i)
                values[i] = loo(static_cast<Eigen::Index>(subsample[i]),
                                static_cast<Eigen::Index>(j));
            std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(rank - 1),
                             values.end());
            per_s(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(j)) = values[rank - 1];
        }
    });

    ThresholdCalibration cal;
    cal.q1 = q1;
    cal.s_sig = s_sig;
    cal.f_sel = f_sel;
    cal.k_values = ensemble.k_values;
    cal.p_thr_per_k.resize(n_k);
    for (size_t j = 0; j < n_k; ++j)
        cal.p_thr_per_k[j] = per_s.col(static_cast<Eigen::Index>(j)).minCoeff();
    cal.p_sig = *std::min_element(cal.p_thr_per_k.begin(), cal.p_thr_per_k.end());
    return cal;
}

std::vector<int> bh_fdr(const PValueSequence& p_values, double q2) {
    if (!(q2 > 0.0 && q2 < 1.0)) throw DataError("q2 must lie in (0, 1)");
    const size_t m = p_values.p.size();
    if (m == 0) return {};

    std::vector<size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return p_values.p[a] < p_values.p[b]; });

    double threshold = -1.0;
    for (size_t rank = m; rank >= 1; --rank) {
        const double p = p_values.p[order[rank - 1]];
        if (p <= q2 * static_cast<double>(rank) / static_cast<double>(m)) {
            threshold = p;
            break;
        }
    }
    if (threshold < 0.0) return {};

    std::vector<int> rejected;
    for (size_t j = 0; j < m; ++j)
        if (p_values.p[j] <= threshold) rejected.push_back(p_values.k_values[j]);
    std::sort(rejected.begin(), rejected.end());
    return rejected;
}

SignificanceReport analyze_against(const Dataset& data, const MethodConfig& config,
                                   const ReferenceEnsemble& ensemble,
                                   const AnalyzeOptions& options) {
    if (ensemble.k_values.empty()) throw DataError("ensemble has an empty k grid");
    const int k_max = ensemble.k_values.back();

    SignificanceReport report;
    report.method = method_name(config.method);
    report.reference_type = reference_type_name(ensemble.reference_type);
    report.n_ref = ensemble.n_ref;
    report.k_max = k_max;
    report.seeds = options.rng;
    report.q2 = options.q2;

    report.h_data = heterogeneity_sequence(data, config, k_max);
    report.delta_data = elbow_sequence(report.h_data);
    report.p_values = empirical_pvalues(report.delta_data, ensemble);
    report.calibration =
        calibrate_threshold(ensemble, options.q1, options.s_sig, options.f_sel,
                            options.rng.substream(2));

    for (size_t j = 0; j < report.p_values.p.size(); ++j)
        if (report.p_values.p[j] < report.calibration.p_sig)
            report.per_k_significant.push_back(report.p_values.k_values[j]);
    report.fdr_significant = bh_fdr(report.p_values, options.q2);

    const std::vector<double>& H = report.h_data.H;
    for (size_t idx = 0; idx + 1 < H.size(); ++idx)
        if (H[idx + 1] > H[idx])
            report.monotonicity_violations.push_back(static_cast<int>(idx) + 1);
    return report;
}

SignificanceReport analyze(const Dataset& data, const MethodConfig& config,
                           const AnalyzeOptions& options) {
    const ReferenceEnsemble ensemble =
        build_ensemble(data, config, options.k_max, options.n_ref, options.reference_type,
                       options.rng.substream(1));
    return analyze_against(data, config, ensemble, options);
}

}  // namespace elbowsig
