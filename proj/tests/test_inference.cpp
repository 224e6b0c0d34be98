#include "elbowsig/inference.hpp"
#include "elbowsig/parallel.hpp"
#include "elbowsig/report_io.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

using namespace elbowsig;

namespace {

/// Ensemble with an explicitly chosen delta matrix (no fitting involved).
ReferenceEnsemble synthetic_ensemble(const Matrix& delta) {
    ReferenceEnsemble ens;
    ens.reference_type = ReferenceType::BoundingBoxUniform;
    ens.n_ref = static_cast<int>(delta.rows());
    ens.k_values.resize(static_cast<std::size_t>(delta.cols()));
    std::iota(ens.k_values.begin(), ens.k_values.end(), 2);
    ens.delta_matrix = delta;
    ens.h_matrix = Matrix::Zero(delta.rows(), delta.cols() + 2);
    ens.seeds.assign(static_cast<std::size_t>(delta.rows()), RngSpec{});
    return ens;
}

ElbowSequence observed(const std::vector<double>& delta) {
    ElbowSequence seq;
    seq.k_values.resize(delta.size());
    std::iota(seq.k_values.begin(), seq.k_values.end(), 2);
    seq.delta = delta;
    seq.degenerate_flags.assign(delta.size(), false);
    return seq;
}

}  // namespace

// -------------------------------------------------------- empirical p-values

TEST_CASE("empirical p-values count exceedances exactly") {
    Matrix delta(4, 1);
    delta << 0.1, 0.2, 0.3, 0.4;
    const ReferenceEnsemble ens = synthetic_ensemble(delta);

    CHECK(empirical_pvalues(observed({0.25}), ens).p[0] == 0.5);   // 2 of 4
    CHECK(empirical_pvalues(observed({0.45}), ens).p[0] == 0.0);   // above all
    CHECK(empirical_pvalues(observed({0.05}), ens).p[0] == 1.0);   // below all
    CHECK(empirical_pvalues(observed({0.3}), ens).p[0] == 0.5);    // tie counts
}

TEST_CASE("ties everywhere give p = 1") {
    const ReferenceEnsemble ens = synthetic_ensemble(Matrix::Constant(6, 2, 0.7));
    const PValueSequence p = empirical_pvalues(observed({0.7, 0.7}), ens);
    CHECK(p.p[0] == 1.0);
    CHECK(p.p[1] == 1.0);
}

TEST_CASE("p-values are exact multiples of 1/N_R") {
    RngStream rng(RngSpec{90, 0});
    Matrix delta(37, 3);
    for (Eigen::Index i = 0; i < delta.rows(); ++i)
        for (Eigen::Index j = 0; j < delta.cols(); ++j) delta(i, j) = rng.normal();
    const ReferenceEnsemble ens = synthetic_ensemble(delta);
    const PValueSequence p = empirical_pvalues(observed({0.1, -0.3, 0.8}), ens);
    for (double value : p.p) {
        const double scaled = value * 37.0;
        CHECK(scaled == doctest::Approx(std::round(scaled)).epsilon(1e-12));
    }
}

TEST_CASE("raising the observed delta weakly decreases its p-value") {
    RngStream rng(RngSpec{91, 0});
    Matrix delta(50, 1);
    for (Eigen::Index i = 0; i < 50; ++i) delta(i, 0) = rng.normal();
    const ReferenceEnsemble ens = synthetic_ensemble(delta);
    double prev = 1.0;
    for (double d = -3.0; d <= 3.0; d += 0.05) {
        const double p = empirical_pvalues(observed({d}), ens).p[0];
        CHECK(p <= prev + 1e-15);
        prev = p;
    }
}

TEST_CASE("grid mismatch is rejected") {
    const ReferenceEnsemble ens = synthetic_ensemble(Matrix::Zero(5, 3));
    CHECK_THROWS_AS(empirical_pvalues(observed({0.0, 0.0}), ens), DataError);
}

// ---------------------------------------------------- threshold calibration

TEST_CASE("rank-statistics oracle with distinct values, S_sig=1, f_sel=1") {
    // With all values distinct, the leave-one-out p-values in a column are a
    // permutation of {0, 1/(N-1), ..., 1}; with f_sel=1 the subsample is the
    // whole set, so the q1-quantile is (ceil(q1*N) - 1)/(N - 1) exactly.
    const int n = 20;
    RngStream rng(RngSpec{92, 0});
    Matrix delta(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
        delta(i, 0) = rng.normal();
        delta(i, 1) = rng.normal();
    }
    const ReferenceEnsemble ens = synthetic_ensemble(delta);
    for (double q1 : {0.05, 0.3, 0.77}) {
        const ThresholdCalibration cal = calibrate_threshold(ens, q1, 1, 1.0, RngSpec{93, 0});
        const double expected =
            (std::ceil(q1 * n) - 1.0) / static_cast<double>(n - 1);
        CHECK(cal.p_thr_per_k[0] == doctest::Approx(expected).epsilon(1e-12));
        CHECK(cal.p_thr_per_k[1] == doctest::Approx(expected).epsilon(1e-12));
        CHECK(cal.p_sig == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("a constant reference column calibrates to threshold 1") {
    Matrix delta(12, 1);
    delta.setConstant(0.4);
    const ThresholdCalibration cal =
        calibrate_threshold(synthetic_ensemble(delta), 0.05, 5, 0.5, RngSpec{94, 0});
    CHECK(cal.p_thr_per_k[0] == 1.0);
    CHECK(cal.p_sig == 1.0);
}

TEST_CASE("p_sig is the minimum of the per-k thresholds") {
    RngStream rng(RngSpec{95, 0});
    Matrix delta(40, 4);
    for (Eigen::Index i = 0; i < delta.rows(); ++i)
        for (Eigen::Index j = 0; j < delta.cols(); ++j) delta(i, j) = rng.normal();
    const ThresholdCalibration cal =
        calibrate_threshold(synthetic_ensemble(delta), 0.1, 10, 0.5, RngSpec{96, 0});
    for (double thr : cal.p_thr_per_k) {
        CHECK(cal.p_sig <= thr);
        CHECK(thr >= 0.0);
        CHECK(thr <= 1.0);
    }
    CHECK(cal.p_sig ==
          *std::min_element(cal.p_thr_per_k.begin(), cal.p_thr_per_k.end()));
}

TEST_CASE("thresholds weakly increase with q1") {
    RngStream rng(RngSpec{97, 0});
    Matrix delta(60, 3);
    for (Eigen::Index i = 0; i < delta.rows(); ++i)
        for (Eigen::Index j = 0; j < delta.cols(); ++j) delta(i, j) = rng.normal();
    const ReferenceEnsemble ens = synthetic_ensemble(delta);
    const ThresholdCalibration low = calibrate_threshold(ens, 0.05, 8, 0.5, RngSpec{98, 0});
    const ThresholdCalibration high = calibrate_threshold(ens, 0.3, 8, 0.5, RngSpec{98, 0});
    for (std::size_t j = 0; j < low.p_thr_per_k.size(); ++j)
        CHECK(high.p_thr_per_k[j] >= low.p_thr_per_k[j] - 1e-15);
}

TEST_CASE("calibration self-consistency keeps the per-k null detection rate within q1") {
    // Feed the ensemble's own rows back as observations. Because p_sig is the
    // minimum over k of already-minimised per-k thresholds, at every single k
    // the fraction of rows whose leave-one-out p-value beats p_sig stays
    // within the q1 budget; across k the rate obeys the union bound n_k * q1.
    const int n_ref = 200;
    const int n_k = 5;
    RngStream rng(RngSpec{99, 0});
    Matrix delta(n_ref, n_k);
    for (Eigen::Index i = 0; i < delta.rows(); ++i)
        for (Eigen::Index j = 0; j < delta.cols(); ++j) delta(i, j) = rng.normal();
    const ReferenceEnsemble ens = synthetic_ensemble(delta);
    const double q1 = 0.05;
    const ThresholdCalibration cal =
        calibrate_threshold(ens, q1, 20, 0.5, RngSpec{100, 0});
    CHECK(cal.p_sig > 0.0);

    int any_detections = 0;
    std::vector<int> per_k_detections(n_k, 0);
    for (Eigen::Index i = 0; i < n_ref; ++i) {
        bool any = false;
        for (Eigen::Index j = 0; j < n_k; ++j) {
            int count_ge = 0;
            for (Eigen::Index r = 0; r < n_ref; ++r)
                if (r != i && delta(r, j) >= delta(i, j)) ++count_ge;
            const double loo_p = static_cast<double>(count_ge) / (n_ref - 1.0);
            if (loo_p < cal.p_sig) {
                any = true;
                ++per_k_detections[static_cast<std::size_t>(j)];
            }
        }
        if (any) ++any_detections;
    }
    for (int count : per_k_detections) {
        const double fraction = static_cast<double>(count) / n_ref;
        CHECK(fraction <= q1);
        CHECK(count >= 1);  // the column maximum always has loo_p = 0 < p_sig
    }
    const double any_fraction = static_cast<double>(any_detections) / n_ref;
    CHECK(any_fraction <= n_k * q1);
}

TEST_CASE("calibration validates its arguments") {
    Matrix small = Matrix::Zero(5, 2);
    CHECK_THROWS_AS(calibrate_threshold(synthetic_ensemble(small), 0.05, 5, 0.5, RngSpec{}),
                    DataError);  // N_R < 10
    Matrix ok = Matrix::Zero(20, 2);
    const ReferenceEnsemble ens = synthetic_ensemble(ok);
    CHECK_THROWS_AS(calibrate_threshold(ens, 0.0, 5, 0.5, RngSpec{}), DataError);
    CHECK_THROWS_AS(calibrate_threshold(ens, 1.0, 5, 0.5, RngSpec{}), DataError);
    CHECK_THROWS_AS(calibrate_threshold(ens, 0.05, 0, 0.5, RngSpec{}), DataError);
    CHECK_THROWS_AS(calibrate_threshold(ens, 0.05, 5, 0.0, RngSpec{}), DataError);
    CHECK_THROWS_AS(calibrate_threshold(ens, 0.05, 5, 1.01, RngSpec{}), DataError);
    CHECK_NOTHROW(calibrate_threshold(ens, 0.05, 5, 1.0, RngSpec{}));
}

// ------------------------------------------------------------------ BH FDR

TEST_CASE("BH worked example from the step-up rule") {
    PValueSequence p;
    p.k_values = {2, 3, 4};
    p.p = {0.01, 0.04, 0.2};
    CHECK(bh_fdr(p, 0.05) == std::vector<int>{2});  // thresholds 0.0167/0.0333/0.05
}

TEST_CASE("BH extremes: all zeros reject everything, all ones nothing") {
    PValueSequence p;
    p.k_values = {2, 3, 4, 5};
    p.p = {0.0, 0.0, 0.0, 0.0};
    CHECK(bh_fdr(p, 0.05) == std::vector<int>{2, 3, 4, 5});
    p.p = {1.0, 1.0, 1.0, 1.0};
    CHECK(bh_fdr(p, 0.05).empty());
}

TEST_CASE("BH equals an exhaustive oracle for m <= 6") {
    RngStream rng(RngSpec{101, 0});
    for (int trial = 0; trial < 300; ++trial) {
        const int m = 1 + static_cast<int>(rng.uniform_index(6));
        PValueSequence p;
        for (int j = 0; j < m; ++j) {
            p.k_values.push_back(j + 2);
            p.p.push_back(static_cast<double>(rng.uniform_index(101)) / 100.0);
        }
        const double q2 = (trial % 3 == 0) ? 0.05 : (trial % 3 == 1 ? 0.1 : 0.25);

        // Oracle: forward scan for the largest satisfying rank.
        std::vector<double> sorted = p.p;
        std::sort(sorted.begin(), sorted.end());
        int best_rank = 0;
        for (int rank = 1; rank <= m; ++rank)
            if (sorted[static_cast<std::size_t>(rank - 1)] <= q2 * rank / m) best_rank = rank;
        std::vector<int> expected;
        if (best_rank > 0) {
            const double cut = sorted[static_cast<std::size_t>(best_rank - 1)];
            for (int j = 0; j < m; ++j)
                if (p.p[static_cast<std::size_t>(j)] <= cut)
                    expected.push_back(p.k_values[static_cast<std::size_t>(j)]);
        }
        std::sort(expected.begin(), expected.end());
        CHECK(bh_fdr(p, q2) == expected);
    }
}

TEST_CASE("BH is order-invariant and weakly grows with q2") {
    PValueSequence p;
    p.k_values = {2, 3, 4, 5, 6};
    p.p = {0.2, 0.01, 0.04, 0.9, 0.03};
    const std::vector<int> base = bh_fdr(p, 0.1);

    PValueSequence shuffled;
    shuffled.k_values = {6, 2, 5, 3, 4};
    shuffled.p = {0.03, 0.2, 0.9, 0.01, 0.04};
    CHECK(bh_fdr(shuffled, 0.1) == base);

    const std::vector<int> generous = bh_fdr(p, 0.3);
    for (int k : base)
        CHECK(std::find(generous.begin(), generous.end(), k) != generous.end());
}

// ------------------------------------------------------------ full analyze

TEST_CASE("two well-separated blobs are detected at k = 2") {
    RngStream rng(RngSpec{102, 0});
    Matrix x(100, 1);
    for (Eigen::Index i = 0; i < 50; ++i) x(i, 0) = rng.normal(-10.0, 0.1);
    for (Eigen::Index i = 50; i < 100; ++i) x(i, 0) = rng.normal(10.0, 0.1);
    const Dataset data{x};

    MethodConfig config;
    config.method = Method::KMeans;
    config.n_init = 8;  // enough restarts to keep the fitted H curve monotone
    AnalyzeOptions options;
    options.k_max = 10;
    options.n_ref = 200;
    options.rng = RngSpec{103, 0};
    config.rng = options.rng.substream(0);

    const SignificanceReport report = analyze(data, config, options);
    CHECK(std::find(report.per_k_significant.begin(), report.per_k_significant.end(), 2) !=
          report.per_k_significant.end());
    CHECK(std::find(report.fdr_significant.begin(), report.fdr_significant.end(), 2) !=
          report.fdr_significant.end());
    CHECK(report.p_values.p[0] == 0.0);
    CHECK(report.monotonicity_violations.empty());
}

TEST_CASE("analyze_against matches analyze given the same derived ensemble") {
    RngStream rng(RngSpec{104, 0});
    Matrix x(40, 2);
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = rng.uniform01();
    const Dataset data{x};

    MethodConfig config;
    config.method = Method::KMeans;
    AnalyzeOptions options;
    options.k_max = 5;
    options.n_ref = 30;
    options.rng = RngSpec{105, 0};
    config.rng = options.rng.substream(0);

    const SignificanceReport direct = analyze(data, config, options);
    const ReferenceEnsemble ens = build_ensemble(data, config, options.k_max, options.n_ref,
                                                 options.reference_type,
                                                 options.rng.substream(1));
    const SignificanceReport indirect = analyze_against(data, config, ens, options);
    CHECK(report_to_json(direct) == report_to_json(indirect));
}

TEST_CASE("analysis reports are byte-identical across reruns and thread counts") {
    RngStream rng(RngSpec{106, 0});
    Matrix x(50, 2);
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = rng.normal();
    const Dataset data{x};

    MethodConfig config;
    config.method = Method::KMeans;
    AnalyzeOptions options;
    options.k_max = 6;
    options.n_ref = 40;
    options.rng = RngSpec{107, 0};
    config.rng = options.rng.substream(0);

    parallel::set_max_threads(1);
    const std::string serial = report_to_json(analyze(data, config, options));
    parallel::set_max_threads(4);
    const std::string threaded = report_to_json(analyze(data, config, options));
    parallel::set_max_threads(0);
    const std::string rerun = report_to_json(analyze(data, config, options));
    CHECK(serial == threaded);
    CHECK(serial == rerun);
}
