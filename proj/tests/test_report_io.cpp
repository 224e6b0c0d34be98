#include "elbowsig/report_io.hpp"

#include <json.hpp>

#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace elbowsig;

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string piece;
    std::istringstream stream(text);
    while (std::getline(stream, piece, sep)) out.push_back(piece);
    return out;
}

/// A small but fully populated report from a real analysis run.
SignificanceReport tiny_report() {
    Matrix x(30, 2);
    RngStream rng(RngSpec{7000, 0});
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const double center = i % 2 == 0 ? -5.0 : 5.0;
        x(i, 0) = rng.normal(center, 0.5);
        x(i, 1) = rng.normal(0.0, 0.5);
    }
    MethodConfig config;
    config.method = Method::Agglomerative;
    AnalyzeOptions options;
    options.k_max = 4;
    options.n_ref = 20;
    options.s_sig = 5;
    options.rng = RngSpec{7001, 0};
    return analyze(Dataset{x}, config, options);
}

ExperimentResult table_result() {
    ExperimentResult result;
    result.design = {{"experiment", "table"}, {"method", "kmeans"}};
    result.k_max = 3;
    result.row_labels = {"elbowsig_per_k", "gap_rule1"};
    result.counts = {{1, 2, 3}, {4, 5, 6}};
    result.replicates_attempted = 9;
    result.replicates_failed = 1;
    result.failures = {"replicate 4: boom"};
    return result;
}

ExperimentResult scaling_result() {
    ExperimentResult result;
    result.design = {{"experiment", "scaling"}};
    result.scaling = {{"kmeans", 8, 0.5, 0.25}, {"kmeans", 80, 0.5, 0.03125}};
    result.scaling_slopes = {{"kmeans", -0.90625}};
    return result;
}

}  // namespace

// ---------------------------------------------------------- report JSON/CSV --

TEST_CASE("report JSON carries the full analysis state under the schema tag") {
    const SignificanceReport report = tiny_report();
    const std::string text = report_to_json(report);
    const nlohmann::json doc = nlohmann::json::parse(text);

    CHECK(doc.at("schema") == "elbowsig.report/1");
    CHECK(doc.at("method") == "agglomerative");
    CHECK(doc.at("reference_type") == report.reference_type);
    CHECK(doc.at("n_ref") == 20);
    CHECK(doc.at("k_max") == 4);
    CHECK(doc.at("seeds").at("master_seed") == 7001);
    CHECK(doc.at("seeds").at("stream_id") == 0);
    CHECK(doc.at("q2") == report.q2);
    CHECK_FALSE(doc.contains("timestamp"));

    // Numeric arrays must round-trip exactly (nlohmann emits shortest-exact).
    REQUIRE(doc.at("heterogeneity").at("k").size() == 5);  // k = 1..k_max+1
    for (std::size_t j = 0; j < report.h_data.H.size(); ++j)
        CHECK(doc.at("heterogeneity").at("H").at(j).get<double>() == report.h_data.H[j]);
    REQUIRE(doc.at("elbow").at("delta").size() == 3);  // k = 2..k_max
    for (std::size_t j = 0; j < report.delta_data.delta.size(); ++j) {
        CHECK(doc.at("elbow").at("delta").at(j).get<double>() == report.delta_data.delta[j]);
        CHECK(doc.at("elbow").at("degenerate").at(j).get<bool>() ==
              static_cast<bool>(report.delta_data.degenerate_flags[j]));
    }
    REQUIRE(doc.at("p_values").at("p").size() == 3);
    for (std::size_t j = 0; j < report.p_values.p.size(); ++j)
        CHECK(doc.at("p_values").at("p").at(j).get<double>() == report.p_values.p[j]);

    CHECK(doc.at("calibration").at("q1") == report.calibration.q1);
    CHECK(doc.at("calibration").at("s_sig") == 5);
    CHECK(doc.at("calibration").at("f_sel") == report.calibration.f_sel);
    CHECK(doc.at("calibration").at("p_sig").get<double>() == report.calibration.p_sig);
    CHECK(doc.at("per_k_significant").get<std::vector<int>>() == report.per_k_significant);
    CHECK(doc.at("fdr_significant").get<std::vector<int>>() == report.fdr_significant);
    CHECK(doc.at("monotonicity_violations").get<std::vector<int>>() ==
          report.monotonicity_violations);
}

TEST_CASE("report JSON is byte-identical across repeated serialization") {
    const SignificanceReport report = tiny_report();
    CHECK(report_to_json(report) == report_to_json(report));
    CHECK(report_to_json(report).back() == '\n');
}

TEST_CASE("report CSV lays out one row per k with empty undefined cells") {
    const SignificanceReport report = tiny_report();
    const std::string text = report_to_csv(report);
    const std::vector<std::string> lines = split(text, '\n');

    REQUIRE(lines.size() == 6);  // header + k = 1..5
    CHECK(lines[0] == "k,H,delta,p,significant_per_k,significant_fdr");
    for (std::size_t row = 1; row < lines.size(); ++row) {
        const std::vector<std::string> cells = split(lines[row] + ",end", ',');
        REQUIRE(cells.size() == 7);  // 6 data cells plus the sentinel
        CHECK(cells[0] == std::to_string(row));

        const double h = std::strtod(cells[1].c_str(), nullptr);
        CHECK(h == report.h_data.H[row - 1]);  // %.17g round-trips exactly

        const int k = static_cast<int>(row);
        if (k >= 2 && k <= report.k_max) {
            const std::size_t j = static_cast<std::size_t>(k - 2);
            CHECK(std::strtod(cells[2].c_str(), nullptr) == report.delta_data.delta[j]);
            CHECK(std::strtod(cells[3].c_str(), nullptr) == report.p_values.p[j]);
            CHECK((cells[4] == "0" || cells[4] == "1"));
            CHECK((cells[5] == "0" || cells[5] == "1"));
        } else {
            CHECK(cells[2].empty());
            CHECK(cells[3].empty());
            CHECK(cells[4].empty());
            CHECK(cells[5].empty());
        }
    }
}

TEST_CASE("report CSV flags agree with the significance sets") {
    const SignificanceReport report = tiny_report();
    const std::vector<std::string> lines = split(report_to_csv(report), '\n');
    for (int k = 2; k <= report.k_max; ++k) {
        const std::vector<std::string> cells = split(lines[static_cast<std::size_t>(k)], ',');
        const bool per_k = std::find(report.per_k_significant.begin(),
                                     report.per_k_significant.end(),
                                     k) != report.per_k_significant.end();
        const bool fdr = std::find(report.fdr_significant.begin(), report.fdr_significant.end(),
                                   k) != report.fdr_significant.end();
        CHECK(cells[4] == (per_k ? "1" : "0"));
        CHECK(cells[5] == (fdr ? "1" : "0"));
    }
}

// ------------------------------------------------------- experiment JSON/CSV --

TEST_CASE("experiment JSON includes the timestamp only when one is provided") {
    const ExperimentResult result = table_result();

    const std::string untimed = experiment_to_json(result);
    const nlohmann::json plain = nlohmann::json::parse(untimed);
    CHECK_FALSE(plain.contains("timestamp"));
    CHECK(untimed == experiment_to_json(result, ""));  // byte-identical without one

    const nlohmann::json timed =
        nlohmann::json::parse(experiment_to_json(result, "2026-08-14T12:00:00Z"));
    CHECK(timed.at("timestamp") == "2026-08-14T12:00:00Z");

    CHECK(plain.at("schema") == "elbowsig.experiment/1");
    CHECK(plain.at("design").at("method") == "kmeans");
    CHECK(plain.at("replicates_attempted") == 9);
    CHECK(plain.at("replicates_failed") == 1);
    CHECK(plain.at("failures").at(0) == "replicate 4: boom");
    CHECK(plain.at("k_max") == 3);
    CHECK(plain.at("row_labels").get<std::vector<std::string>>() == result.row_labels);
    CHECK(plain.at("counts").at(1).at(2) == 6);
    CHECK_FALSE(plain.contains("scaling"));
}

TEST_CASE("experiment JSON for a scaling run carries rows and slopes") {
    const nlohmann::json doc = nlohmann::json::parse(experiment_to_json(scaling_result()));
    CHECK_FALSE(doc.contains("counts"));
    CHECK_FALSE(doc.contains("row_labels"));
    REQUIRE(doc.at("scaling").size() == 2);
    CHECK(doc.at("scaling").at(0).at("method") == "kmeans");
    CHECK(doc.at("scaling").at(0).at("d") == 8);
    CHECK(doc.at("scaling").at(1).at("var_delta").get<double>() == 0.03125);
    CHECK(doc.at("scaling_slopes").at("kmeans").get<double>() == -0.90625);
}

TEST_CASE("experiment counts CSV is one tidy row per label and k") {
    CHECK(experiment_counts_csv(table_result()) ==
          "method,k,count\n"
          "elbowsig_per_k,1,1\n"
          "elbowsig_per_k,2,2\n"
          "elbowsig_per_k,3,3\n"
          "gap_rule1,1,4\n"
          "gap_rule1,2,5\n"
          "gap_rule1,3,6\n");
    CHECK(experiment_counts_csv(scaling_result()) == "method,k,count\n");
}

TEST_CASE("experiment scaling CSV prints full-precision statistics") {
    CHECK(experiment_scaling_csv(scaling_result()) ==
          "method,d,mean_delta,var_delta\n"
          "kmeans,8,0.5,0.25\n"
          "kmeans,80,0.5,0.03125\n");
    CHECK(experiment_scaling_csv(table_result()) == "method,d,mean_delta,var_delta\n");
}

// ----------------------------------------------------------- baselines JSON --

TEST_CASE("baselines JSON records the gap rules and every index curve") {
    GapResult gap;
    gap.k_values = {1, 2, 3};
    gap.gap = {0.1, 0.4, 0.3};
    gap.s_k = {0.01, 0.02, 0.03};
    gap.k_hat_rule1 = 2;
    gap.k_hat_rule2 = 2;
    gap.rule1_defaulted = false;

    IndexCurve ch;
    ch.index = ValidityIndex::CalinskiHarabasz;
    ch.k_values = {2, 3};
    ch.scores = {10.0, 40.0};
    ch.k_hat = 3;
    IndexCurve db;
    db.index = ValidityIndex::DaviesBouldin;
    db.k_values = {2, 3};
    db.scores = {0.9, 0.4};
    db.k_hat = 3;

    const std::string text =
        baselines_to_json(gap, {ch, db}, {{"data", "toy.csv"}, {"method", "kmeans"}});
    const nlohmann::json doc = nlohmann::json::parse(text);
    CHECK(doc.at("schema") == "elbowsig.baselines/1");
    CHECK(doc.at("metadata").at("data") == "toy.csv");
    CHECK(doc.at("metadata").at("method") == "kmeans");
    CHECK(doc.at("gap").at("k").get<std::vector<int>>() == gap.k_values);
    CHECK(doc.at("gap").at("gap").at(1).get<double>() == 0.4);
    CHECK(doc.at("gap").at("s_k").at(2).get<double>() == 0.03);
    CHECK(doc.at("gap").at("k_hat_rule1") == 2);
    CHECK(doc.at("gap").at("k_hat_rule2") == 2);
    CHECK(doc.at("gap").at("rule1_defaulted") == false);
    REQUIRE(doc.at("indices").size() == 2);
    CHECK(doc.at("indices").at(0).at("index") == "ch");
    CHECK(doc.at("indices").at(0).at("k_hat") == 3);
    CHECK(doc.at("indices").at(1).at("index") == "db");
    CHECK(doc.at("indices").at(1).at("scores").at(1).get<double>() == 0.4);
}

// ----------------------------------------------------------- write_text_file --

TEST_CASE("write_text_file writes bytes verbatim and reports unwritable paths") {
    const std::filesystem::path path =
        std::filesystem::temp_directory_path() / "elbowsig_report_io_test.txt";
    const std::string content = "line one\nline two\n";
    write_text_file(path.string(), content);
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    CHECK(buffer.str() == content);
    std::filesystem::remove(path);

    CHECK_THROWS_WITH_AS(write_text_file("/nonexistent/dir/out.txt", "x"),
                         doctest::Contains("cannot open"), DataError);
}
