// elbowsig command-line interface.
//
// Subcommands:
//   analyze    significance analysis of one dataset (CSV in, report out)
//   simulate   replicated table experiment driven by a config file
//   scaling    dimension-scaling sweep driven by a config file
//   theory     closed-form null predictions for the elbow statistic
//   baselines  gap statistic and validity indices for one dataset
//
// Exit codes: 0 success, 2 bad flags/config dispatch, 3 data errors,
// 4 numeric failures.

#include "elbowsig/baselines.hpp"
#include "elbowsig/clustering.hpp"
#include "elbowsig/dataset.hpp"
#include "elbowsig/elbow.hpp"
#include "elbowsig/inference.hpp"
#include "elbowsig/parallel.hpp"
#include "elbowsig/report_io.hpp"
#include "elbowsig/simstudy.hpp"
#include "elbowsig/theory.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <ctime>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace elbowsig;

/// Flag combinations CLI11 cannot express (open intervals, cross-flag
/// constraints). Reported like parse errors: message to stderr, exit 2.
class FlagError : public std::runtime_error {
public:
    explicit FlagError(const std::string& msg) : std::runtime_error(msg) {}
};

std::string utc_timestamp() {
    std::time_t now = std::time(nullptr);
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    char buffer[32];
    std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buffer;
}

std::string format_k_set(const std::vector<int>& ks) {
    if (ks.empty()) return "(none)";
    std::ostringstream out;
    out << '{';
    for (size_t i = 0; i < ks.size(); ++i) out << (i ? ", " : "") << ks[i];
    out << '}';
    return out.str();
}

bool contains_k(const std::vector<int>& ks, int k) {
    return std::find(ks.begin(), ks.end(), k) != ks.end();
}

/// Shared flags of the subcommands that fit clustering models.
struct MethodFlags {
    std::string method = "kmeans";
    double fuzzifier = 2.0;
    int max_iter = 300;
    double tol = 1e-6;
    int n_init = 1;
    double covariance_reg = 0.0;

    void attach(CLI::App& cmd) {
        cmd.add_option("--method", method, "Clustering method")
            ->capture_default_str()
            ->check(CLI::IsMember({"agglomerative", "kmeans", "fcm", "gmm"}));
        cmd.add_option("--fuzzifier", fuzzifier, "FCM fuzzifier m (> 1)")->capture_default_str();
        cmd.add_option("--max-iter", max_iter, "Iteration cap for iterative fits")
            ->capture_default_str()
            ->check(CLI::PositiveNumber);
        cmd.add_option("--tol", tol, "Relative-change convergence tolerance")
            ->capture_default_str()
            ->check(CLI::PositiveNumber);
        cmd.add_option("--n-init", n_init, "Restarts per iterative fit (best kept)")
            ->capture_default_str()
            ->check(CLI::PositiveNumber);
        cmd.add_option("--covariance-reg", covariance_reg,
                       "GMM covariance ridge (0 selects a data-scaled default)")
            ->capture_default_str()
            ->check(CLI::NonNegativeNumber);
    }

    MethodConfig to_config(const RngSpec& rng) const {
        if (fuzzifier <= 1.0) throw FlagError("--fuzzifier must be > 1");
        MethodConfig config;
        config.method = method_from_name(method);
        config.fuzzifier = fuzzifier;
        config.max_iter = max_iter;
        config.tol = tol;
        config.n_init = n_init;
        config.covariance_reg = covariance_reg;
        config.rng = rng;
        return config;
    }
};

Dataset load_input(const std::string& path, bool has_header, bool standardize) {
    Dataset data = load_csv(path, has_header);
    if (standardize) data = standardized(data);
    return data;
}

void write_or_print(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) return;
    write_text_file(out_path, content);
    std::cout << "wrote " << out_path << "\n";
}

// ---------------------------------------------------------------- analyze --

struct AnalyzeArgs {
    std::string data_path;
    bool has_header = false;
    bool standardize = false;
    MethodFlags method;
    std::string reference = "bbox";
    int k_max = 10;
    int n_ref = 200;
    double q1 = 0.05;
    double q2 = 0.05;
    int s_sig = 50;
    double f_sel = 0.5;
    std::uint64_t seed = 0;
    std::string out_path;
    std::string format = "json";
};

void print_report_summary(const SignificanceReport& report, const Dataset& data) {
    std::printf("method=%s  reference=%s  N=%ld  D=%ld  N_R=%d  k_max=%d\n",
                report.method.c_str(), report.reference_type.c_str(),
                static_cast<long>(data.n_rows()), static_cast<long>(data.n_cols()),
                report.n_ref, report.k_max);
    std::printf("calibration: q1=%g  S_sig=%d  f_sel=%g  ->  p_sig=%g   (FDR level q2=%g)\n",
                report.calibration.q1, report.calibration.s_sig, report.calibration.f_sel,
                report.calibration.p_sig, report.q2);
    std::printf("\n%4s  %14s  %12s  %8s  %6s  %4s\n", "k", "H_k", "delta_k", "p_k", "per-k",
                "FDR");
    for (size_t idx = 0; idx < report.h_data.k_values.size(); ++idx) {
        const int k = report.h_data.k_values[idx];
        std::printf("%4d  %14.6g", k, report.h_data.H[idx]);
        const auto& dk = report.delta_data.k_values;
        const auto pos = std::find(dk.begin(), dk.end(), k);
        if (pos == dk.end()) {
            std::printf("  %12s  %8s\n", "--", "--");
            continue;
        }
        const size_t j = static_cast<size_t>(pos - dk.begin());
        char delta_cell[32];
        std::snprintf(delta_cell, sizeof(delta_cell), "%.6g%s", report.delta_data.delta[j],
                      report.delta_data.degenerate_flags[j] ? "!" : "");
        std::printf("  %12s  %8.4f  %6s  %4s\n", delta_cell, report.p_values.p[j],
                    contains_k(report.per_k_significant, k) ? "*" : "",
                    contains_k(report.fdr_significant, k) ? "+" : "");
    }
    std::printf("\nper-k significant (p_k < p_sig): %s\n",
                format_k_set(report.per_k_significant).c_str());
    std::printf("FDR significant (BH at q2):      %s\n",
                format_k_set(report.fdr_significant).c_str());
    if (report.per_k_significant.empty() && report.fdr_significant.empty())
        std::printf("conclusion: k = 1 (no detected structure)\n");
    if (!report.monotonicity_violations.empty())
        std::printf("warning: heterogeneity increased at k in %s (fit instability)\n",
                    format_k_set(report.monotonicity_violations).c_str());
    if (std::find(report.delta_data.degenerate_flags.begin(),
                  report.delta_data.degenerate_flags.end(),
                  true) != report.delta_data.degenerate_flags.end())
        std::printf("note: '!' marks a degenerate elbow statistic (flat heterogeneity step)\n");
}

int run_analyze(const AnalyzeArgs& args) {
    if (args.q1 <= 0.0 || args.q1 >= 1.0) throw FlagError("--q1 must lie strictly in (0, 1)");
    if (args.q2 <= 0.0 || args.q2 >= 1.0) throw FlagError("--q2 must lie strictly in (0, 1)");
    if (args.f_sel <= 0.0 || args.f_sel > 1.0) throw FlagError("--f-sel must lie in (0, 1]");

    const Dataset data = load_input(args.data_path, args.has_header, args.standardize);

    AnalyzeOptions options;
    options.k_max = args.k_max;
    options.n_ref = args.n_ref;
    options.reference_type = reference_type_from_name(args.reference);
    options.q1 = args.q1;
    options.q2 = args.q2;
    options.s_sig = args.s_sig;
    options.f_sel = args.f_sel;
    options.rng = RngSpec{args.seed, 0};

    const MethodConfig config = args.method.to_config(options.rng.substream(0));
    const SignificanceReport report = analyze(data, config, options);

    print_report_summary(report, data);
    write_or_print(args.out_path,
                   args.format == "csv" ? report_to_csv(report) : report_to_json(report));
    return 0;
}

// ----------------------------------------------------- simulate / scaling --

struct ExperimentArgs {
    std::string config_path;
    std::string out_prefix;
    std::uint64_t seed = 0;
    bool seed_given = false;
    bool dry_run = false;
    bool no_timestamp = false;
};

void print_design_echo(const std::map<std::string, std::string>& design) {
    for (const auto& [key, value] : design) std::printf("  %-16s = %s\n", key.c_str(), value.c_str());
}

void print_counts(const ExperimentResult& result) {
    std::printf("counts (columns k = 1..%d):\n", result.k_max);
    for (size_t row = 0; row < result.row_labels.size(); ++row) {
        std::printf("  %-16s", result.row_labels[row].c_str());
        for (long count : result.counts[row]) std::printf(" %4ld", count);
        std::printf("\n");
    }
}

int finish_experiment(const ExperimentResult& result, const ExperimentArgs& args,
                      const std::string& stage) {
    const std::string timestamp = args.no_timestamp ? "" : utc_timestamp();
    write_or_print(args.out_prefix + ".json", experiment_to_json(result, timestamp));
    if (!result.counts.empty())
        write_or_print(args.out_prefix + "_counts.csv", experiment_counts_csv(result));
    if (!result.scaling.empty())
        write_or_print(args.out_prefix + "_scaling.csv", experiment_scaling_csv(result));

    if (result.replicates_failed > 0) {
        std::fprintf(stderr, "%s: %d of %d replicates failed:\n", stage.c_str(),
                     result.replicates_failed, result.replicates_attempted);
        for (const std::string& failure : result.failures)
            std::fprintf(stderr, "  %s\n", failure.c_str());
        if (100L * result.replicates_failed > result.replicates_attempted) {
            std::fprintf(stderr, "%s: failure rate exceeds 1%%; aborting\n", stage.c_str());
            return 4;
        }
    }
    return 0;
}

int run_simulate(const ExperimentArgs& args) {
    auto kv = parse_config_file(args.config_path);
    if (design_kind(kv) != "table")
        throw FlagError("config '" + args.config_path +
                        "' declares a scaling experiment; use the scaling subcommand");
    TableDesign design = table_design_from_config(kv);
    if (args.seed_given) design.rng = RngSpec{args.seed, 0};

    if (args.dry_run) {
        std::printf("table experiment (dry run), config %s:\n", args.config_path.c_str());
        print_design_echo(kv);
        return 0;
    }

    const ExperimentResult result = run_table_experiment(design);
    std::printf("table experiment: %d replicates, %d failed\n", result.replicates_attempted,
                result.replicates_failed);
    print_counts(result);
    return finish_experiment(result, args, "simulate");
}

int run_scaling(const ExperimentArgs& args) {
    auto kv = parse_config_file(args.config_path);
    if (design_kind(kv) != "scaling")
        throw FlagError("config '" + args.config_path +
                        "' declares a table experiment; use the simulate subcommand");
    ScalingDesign design = scaling_design_from_config(kv);
    if (args.seed_given) design.rng = RngSpec{args.seed, 0};

    if (args.dry_run) {
        std::printf("scaling experiment (dry run), config %s:\n", args.config_path.c_str());
        print_design_echo(kv);
        return 0;
    }

    const ExperimentResult result = run_scaling_experiment(design);
    std::printf("scaling experiment: %zu (method, D) cells\n", result.scaling.size());
    std::printf("%-16s %6s  %14s  %14s\n", "method", "D", "mean_delta", "var_delta");
    for (const ScalingRow& row : result.scaling)
        std::printf("%-16s %6d  %14.6g  %14.6g\n", row.method.c_str(), row.d, row.mean_delta,
                    row.var_delta);
    for (const auto& [method, slope] : result.scaling_slopes)
        std::printf("ln var(delta) vs ln D slope, %s: %.4f\n", method.c_str(), slope);
    return finish_experiment(result, args, "scaling");
}

// ----------------------------------------------------------------- theory --

struct TheoryArgs {
    int k_min = 2;
    int k_max = 10;
    std::vector<int> dims = {1, 2, 5, 10, 50};
    std::vector<double> fuzzifiers = {1.5, 2.0, 3.0};
    std::string out_path;
};

int run_theory(const TheoryArgs& args) {
    if (args.k_min < 2) throw FlagError("--k-min must be >= 2");
    if (args.k_max < args.k_min) throw FlagError("--k-max must be >= --k-min");

    std::ostringstream csv;
    csv << "model,param,k,delta\n";
    char line[96];
    for (int d : args.dims)
        for (int k = args.k_min; k <= args.k_max; ++k) {
            std::snprintf(line, sizeof(line), "large_n,%d,%d,%.17g\n", d, k,
                          predicted_delta_large_n(d, k));
            csv << line;
        }
    for (double m : args.fuzzifiers)
        for (int k = args.k_min; k <= args.k_max; ++k) {
            std::snprintf(line, sizeof(line), "fcm,%.17g,%d,%.17g\n", m, k,
                          predicted_delta_fcm(k, m));
            csv << line;
        }
    for (int k = args.k_min; k <= args.k_max; ++k) {
        std::snprintf(line, sizeof(line), "gmm,,%d,%.17g\n", k, predicted_delta_gmm(k));
        csv << line;
    }

    if (args.out_path.empty())
        std::cout << csv.str();
    else
        write_or_print(args.out_path, csv.str());
    return 0;
}

// -------------------------------------------------------------- baselines --

struct BaselinesArgs {
    std::string data_path;
    bool has_header = false;
    bool standardize = false;
    MethodFlags method;
    std::string reference = "bbox";
    int k_max = 10;
    int n_ref = 200;
    std::uint64_t seed = 0;
    std::string out_path;
};

int run_baselines(const BaselinesArgs& args) {
    const Dataset data = load_input(args.data_path, args.has_header, args.standardize);
    const RngSpec base{args.seed, 0};
    const MethodConfig config = args.method.to_config(base.substream(0));

    const GapResult gap = gap_statistic(data, config, args.k_max, args.n_ref,
                                        reference_type_from_name(args.reference),
                                        base.substream(1));
    std::vector<IndexCurve> curves;
    for (ValidityIndex index : {ValidityIndex::CalinskiHarabasz, ValidityIndex::DaviesBouldin,
                                ValidityIndex::Silhouette})
        curves.push_back(index_curve(data, config, args.k_max, index));

    std::printf("method=%s  reference=%s  N=%ld  D=%ld  N_R=%d  k_max=%d\n",
                args.method.method.c_str(), args.reference.c_str(),
                static_cast<long>(data.n_rows()), static_cast<long>(data.n_cols()), args.n_ref,
                args.k_max);
    std::printf("\n%4s  %12s  %12s", "k", "gap", "s_k");
    for (const IndexCurve& curve : curves)
        std::printf("  %12s", validity_index_name(curve.index).c_str());
    std::printf("\n");
    for (size_t idx = 0; idx < gap.k_values.size(); ++idx) {
        std::printf("%4d  %12.6g  %12.6g", gap.k_values[idx], gap.gap[idx], gap.s_k[idx]);
        for (const IndexCurve& curve : curves) {
            const auto pos =
                std::find(curve.k_values.begin(), curve.k_values.end(), gap.k_values[idx]);
            if (pos == curve.k_values.end())
                std::printf("  %12s", "--");
            else
                std::printf("  %12.6g",
                            curve.scores[static_cast<size_t>(pos - curve.k_values.begin())]);
        }
        std::printf("\n");
    }
    std::printf("\ngap rule I:  k_hat = %d%s\n", gap.k_hat_rule1,
                gap.rule1_defaulted ? "  (no k satisfied rule I; defaulted to k_max)" : "");
    std::printf("gap rule II: k_hat = %d\n", gap.k_hat_rule2);
    for (const IndexCurve& curve : curves)
        std::printf("%-11s: k_hat = %d\n", validity_index_name(curve.index).c_str(), curve.k_hat);

    if (!args.out_path.empty()) {
        std::map<std::string, std::string> meta{
            {"data", args.data_path},
            {"method", args.method.method},
            {"reference", args.reference},
            {"n", std::to_string(data.n_rows())},
            {"d", std::to_string(data.n_cols())},
            {"n_ref", std::to_string(args.n_ref)},
            {"k_max", std::to_string(args.k_max)},
            {"seed", std::to_string(args.seed)},
            {"standardize", args.standardize ? "true" : "false"},
        };
        write_or_print(args.out_path, baselines_to_json(gap, curves, meta));
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"elbowsig: significance testing for the clustering elbow"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "elbowsig 1.0.0");

    int threads = 0;
    app.add_option("--threads", threads, "Worker thread cap (0 = hardware concurrency)")
        ->check(CLI::NonNegativeNumber);

    AnalyzeArgs analyze_args;
    CLI::App* cmd_analyze =
        app.add_subcommand("analyze", "Elbow significance analysis of a CSV dataset");
    cmd_analyze->add_option("--data", analyze_args.data_path, "Input CSV file")->required();
    cmd_analyze->add_flag("--header", analyze_args.has_header, "CSV starts with a header row");
    cmd_analyze->add_flag("--standardize", analyze_args.standardize,
                          "Center and scale features before the analysis");
    analyze_args.method.attach(*cmd_analyze);
    cmd_analyze->add_option("--reference", analyze_args.reference, "Null reference generator")
        ->capture_default_str()
        ->check(CLI::IsMember({"bbox", "pca"}));
    cmd_analyze->add_option("--k-max", analyze_args.k_max, "Largest candidate k")
        ->capture_default_str()
        ->check(CLI::Range(2, 1000000));
    cmd_analyze->add_option("--n-ref", analyze_args.n_ref, "Reference ensemble size")
        ->capture_default_str()
        ->check(CLI::Range(2, 1000000));
    cmd_analyze->add_option("--q1", analyze_args.q1, "Per-k familywise level")
        ->capture_default_str();
    cmd_analyze->add_option("--q2", analyze_args.q2, "BH false-discovery level")
        ->capture_default_str();
    cmd_analyze->add_option("--s-sig", analyze_args.s_sig, "Calibration repetitions")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd_analyze->add_option("--f-sel", analyze_args.f_sel, "Calibration subsample fraction")
        ->capture_default_str();
    cmd_analyze->add_option("--seed", analyze_args.seed, "Master seed")->capture_default_str();
    cmd_analyze->add_option("--out", analyze_args.out_path, "Report output path");
    cmd_analyze->add_option("--format", analyze_args.format, "Report file format")
        ->capture_default_str()
        ->check(CLI::IsMember({"json", "csv"}));

    ExperimentArgs simulate_args;
    CLI::App* cmd_simulate =
        app.add_subcommand("simulate", "Replicated table experiment from a config file");
    cmd_simulate->add_option("config", simulate_args.config_path, "Experiment config file")
        ->required();
    cmd_simulate->add_option("--out", simulate_args.out_prefix, "Output file prefix")
        ->default_val("experiment");
    cmd_simulate->add_option("--seed", simulate_args.seed, "Master seed (overrides the config)");
    cmd_simulate->add_flag("--dry-run", simulate_args.dry_run,
                           "Parse and echo the design without running");
    cmd_simulate->add_flag("--no-timestamp", simulate_args.no_timestamp,
                           "Omit the timestamp metadata field");

    ExperimentArgs scaling_args;
    CLI::App* cmd_scaling =
        app.add_subcommand("scaling", "Dimension-scaling sweep from a config file");
    cmd_scaling->add_option("config", scaling_args.config_path, "Experiment config file")
        ->required();
    cmd_scaling->add_option("--out", scaling_args.out_prefix, "Output file prefix")
        ->default_val("scaling");
    cmd_scaling->add_option("--seed", scaling_args.seed, "Master seed (overrides the config)");
    cmd_scaling->add_flag("--dry-run", scaling_args.dry_run,
                          "Parse and echo the design without running");
    cmd_scaling->add_flag("--no-timestamp", scaling_args.no_timestamp,
                          "Omit the timestamp metadata field");

    TheoryArgs theory_args;
    CLI::App* cmd_theory =
        app.add_subcommand("theory", "Closed-form null predictions (CSV: model,param,k,delta)");
    cmd_theory->add_option("--k-min", theory_args.k_min, "Smallest k")->capture_default_str();
    cmd_theory->add_option("--k-max", theory_args.k_max, "Largest k")->capture_default_str();
    cmd_theory->add_option("--d", theory_args.dims, "Dimensions for the large-N prediction")
        ->delimiter(',')
        ->capture_default_str();
    cmd_theory->add_option("--m", theory_args.fuzzifiers, "Fuzzifiers for the FCM prediction")
        ->delimiter(',')
        ->capture_default_str();
    cmd_theory->add_option("--out", theory_args.out_path, "Write the CSV here instead of stdout");

    BaselinesArgs baselines_args;
    CLI::App* cmd_baselines =
        app.add_subcommand("baselines", "Gap statistic and validity indices for a CSV dataset");
    cmd_baselines->add_option("--data", baselines_args.data_path, "Input CSV file")->required();
    cmd_baselines->add_flag("--header", baselines_args.has_header, "CSV starts with a header row");
    cmd_baselines->add_flag("--standardize", baselines_args.standardize,
                            "Center and scale features before scoring");
    baselines_args.method.attach(*cmd_baselines);
    cmd_baselines->add_option("--reference", baselines_args.reference, "Gap reference generator")
        ->capture_default_str()
        ->check(CLI::IsMember({"bbox", "pca"}));
    cmd_baselines->add_option("--k-max", baselines_args.k_max, "Largest candidate k")
        ->capture_default_str()
        ->check(CLI::Range(2, 1000000));
    cmd_baselines->add_option("--n-ref", baselines_args.n_ref, "Gap reference count")
        ->capture_default_str()
        ->check(CLI::Range(2, 1000000));
    cmd_baselines->add_option("--seed", baselines_args.seed, "Master seed")
        ->capture_default_str();
    cmd_baselines->add_option("--out", baselines_args.out_path, "JSON output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    simulate_args.seed_given = cmd_simulate->count("--seed") > 0;
    scaling_args.seed_given = cmd_scaling->count("--seed") > 0;
    const std::string stage = app.get_subcommands().front()->get_name();

    try {
        parallel::set_max_threads(threads);
        if (*cmd_analyze) return run_analyze(analyze_args);
        if (*cmd_simulate) return run_simulate(simulate_args);
        if (*cmd_scaling) return run_scaling(scaling_args);
        if (*cmd_theory) return run_theory(theory_args);
        if (*cmd_baselines) return run_baselines(baselines_args);
    } catch (const FlagError& e) {
        std::cerr << stage << ": " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << stage << ": data error: " << e.what() << "\n";
        return 3;
    } catch (const NumericError& e) {
        std::cerr << stage << ": numeric error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << stage << ": error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
