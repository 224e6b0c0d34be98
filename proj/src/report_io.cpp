#include "elbowsig/report_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace elbowsig {
namespace {

using Json = nlohmann::ordered_json;

std::string g17(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

Json rng_to_json(const RngSpec& rng) {
    return Json{{"master_seed", rng.master_seed}, {"stream_id", rng.stream_id}};
}

}  // namespace

std::string report_to_json(const SignificanceReport& report) {
    Json doc;
    doc["schema"] = kReportSchema;
    doc["method"] = report.method;
    doc["reference_type"] = report.reference_type;
    doc["n_ref"] = report.n_ref;
    doc["k_max"] = report.k_max;
    doc["seeds"] = rng_to_json(report.seeds);
    doc["q2"] = report.q2;
    doc["heterogeneity"] = Json{{"k", report.h_data.k_values}, {"H", report.h_data.H}};
    doc["elbow"] = Json{{"k", report.delta_data.k_values},
                        {"delta", report.delta_data.delta},
                        {"degenerate", report.delta_data.degenerate_flags}};
    doc["p_values"] = Json{{"k", report.p_values.k_values}, {"p", report.p_values.p}};
    doc["calibration"] = Json{{"q1", report.calibration.q1},
                              {"s_sig", report.calibration.s_sig},
                              {"f_sel", report.calibration.f_sel},
                              {"k", report.calibration.k_values},
                              {"p_thr_per_k", report.calibration.p_thr_per_k},
                              {"p_sig", report.calibration.p_sig}};
    doc["per_k_significant"] = report.per_k_significant;
    doc["fdr_significant"] = report.fdr_significant;
    doc["monotonicity_violations"] = report.monotonicity_violations;
    return doc.dump(2) + "\n";
}

std::string report_to_csv(const SignificanceReport& report) {
    std::ostringstream out;
    out << "k,H,delta,p,significant_per_k,significant_fdr\n";
    const auto in_set = [](const std::vector<int>& ks, int k) {
        return std::find(ks.begin(), ks.end(), k) != ks.end();
    };
    for (size_t idx = 0; idx < report.h_data.k_values.size(); ++idx) {
        const int k = report.h_data.k_values[idx];
        out << k << ',' << g17(report.h_data.H[idx]) << ',';
        if (k >= 2 && k <= report.k_max) {
            const size_t j = static_cast<size_t>(k - 2);
            out << g17(report.delta_data.delta[j]) << ',' << g17(report.p_values.p[j]) << ','
                << (in_set(report.per_k_significant, k) ? 1 : 0) << ','
                << (in_set(report.fdr_significant, k) ? 1 : 0);
        } else {
            out << ",,,";
        }
        out << '\n';
    }
    return out.str();
}

std::string experiment_to_json(const ExperimentResult& result, const std::string& timestamp) {
    Json doc;
    doc["schema"] = kExperimentSchema;
    doc["design"] = result.design;
    if (!timestamp.empty()) doc["timestamp"] = timestamp;
    doc["replicates_attempted"] = result.replicates_attempted;
    doc["replicates_failed"] = result.replicates_failed;
    doc["failures"] = result.failures;
    if (!result.row_labels.empty()) {
        doc["k_max"] = result.k_max;
        doc["row_labels"] = result.row_labels;
        doc["counts"] = result.counts;
    }
    if (!result.scaling.empty()) {
        Json rows = Json::array();
        for (const ScalingRow& row : result.scaling)
            rows.push_back(Json{{"method", row.method},
                                {"d", row.d},
                                {"mean_delta", row.mean_delta},
                                {"var_delta", row.var_delta}});
        doc["scaling"] = std::move(rows);
        doc["scaling_slopes"] = result.scaling_slopes;
    }
    return doc.dump(2) + "\n";
}

std::string experiment_counts_csv(const ExperimentResult& result) {
    std::ostringstream out;
    out << "method,k,count\n";
    for (size_t row = 0; row < result.row_labels.size(); ++row)
        for (int k = 1; k <= result.k_max; ++k)
            out << result.row_labels[row] << ',' << k << ','
                << result.counts[row][static_cast<size_t>(k - 1)] << '\n';
    return out.str();
}

std::string experiment_scaling_csv(const ExperimentResult& result) {
    std::ostringstream out;
    out << "method,d,mean_delta,var_delta\n";
    for (const ScalingRow& row : result.scaling)
        out << row.method << ',' << row.d << ',' << g17(row.mean_delta) << ','
            << g17(row.var_delta) << '\n';
    return out.str();
}

std::string baselines_to_json(const GapResult& gap, const std::vector<IndexCurve>& curves,
                              const std::map<std::string, std::string>& metadata) {
    Json doc;
    doc["schema"] = kBaselinesSchema;
    doc["metadata"] = metadata;
    doc["gap"] = Json{{"k", gap.k_values},
                      {"gap", gap.gap},
                      {"s_k", gap.s_k},
                      {"k_hat_rule1", gap.k_hat_rule1},
                      {"k_hat_rule2", gap.k_hat_rule2},
                      {"rule1_defaulted", gap.rule1_defaulted}};
    Json indices = Json::array();
    for (const IndexCurve& curve : curves)
        indices.push_back(Json{{"index", validity_index_name(curve.index)},
                               {"k", curve.k_values},
                               {"scores", curve.scores},
                               {"k_hat", curve.k_hat}});
    doc["indices"] = std::move(indices);
    return doc.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw DataError("failed while writing '" + path + "'");
}

}  // namespace elbowsig
