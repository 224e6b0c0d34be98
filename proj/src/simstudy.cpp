#include "elbowsig/simstudy.hpp"

#include "elbowsig/parallel.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace elbowsig {
namespace {

std::string format_compact(double value) {
    char buffer[40];
    const auto res = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, res.ptr);
}

std::string trim(const std::string& s) {
    size_t begin = 0;
    size_t end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return s.substr(begin, end - begin);
}

Dataset make_table_data(const TableDesign& design, const RngSpec& rng) {
    switch (design.generator) {
        case GeneratorKind::Blobs: {
            BlobSpec spec;
            spec.n = design.n;
            spec.d = design.d;
            spec.components = design.components;
            spec.sigma_c = design.sigma_c;
            spec.box_halfwidth = design.box_halfwidth;
            spec.rng = rng;
            return gen_blobs(spec).data;
        }
        case GeneratorKind::UniformBox01:
            return gen_unstructured(design.n, design.d, UnstructuredKind::UniformBox01, 1.0, rng);
        case GeneratorKind::GaussianIso:
            return gen_unstructured(design.n, design.d, UnstructuredKind::GaussianIso, design.sigma,
                                    rng);
    }
    throw std::logic_error("invalid GeneratorKind enum value");
}

std::string generator_name(GeneratorKind kind) {
    switch (kind) {
        case GeneratorKind::Blobs: return "blobs";
        case GeneratorKind::UniformBox01: return "uniform";
        case GeneratorKind::GaussianIso: return "gaussian";
    }
    throw std::logic_error("invalid GeneratorKind enum value");
}

std::map<std::string, std::string> table_design_echo(const TableDesign& d) {
    std::map<std::string, std::string> echo;
    echo["experiment"] = "table";
    echo["replicates"] = std::to_string(d.replicates);
    echo["generator"] = generator_name(d.generator);
    echo["n"] = std::to_string(d.n);
    echo["d"] = std::to_string(d.d);
    if (d.generator == GeneratorKind::Blobs) {
        echo["components"] = std::to_string(d.components);
        echo["sigma_c"] = format_compact(d.sigma_c);
        echo["box_halfwidth"] = format_compact(d.box_halfwidth);
    }
    if (d.generator == GeneratorKind::GaussianIso) echo["sigma"] = format_compact(d.sigma);
    echo["method"] = method_name(d.method.method);
    if (d.method.method == Method::Fcm) echo["fuzzifier"] = format_compact(d.method.fuzzifier);
    echo["max_iter"] = std::to_string(d.method.max_iter);
    echo["tol"] = format_compact(d.method.tol);
    echo["n_init"] = std::to_string(d.method.n_init);
    if (d.method.method == Method::Gmm)
        echo["covariance_reg"] = format_compact(d.method.covariance_reg);
    echo["reference"] = reference_type_name(d.analysis.reference_type);
    echo["k_max"] = std::to_string(d.analysis.k_max);
    echo["n_ref"] = std::to_string(d.analysis.n_ref);
    echo["q1"] = format_compact(d.analysis.q1);
    echo["q2"] = format_compact(d.analysis.q2);
    echo["s_sig"] = std::to_string(d.analysis.s_sig);
    echo["f_sel"] = format_compact(d.analysis.f_sel);
    echo["run_baselines"] = d.run_baselines ? "true" : "false";
    echo["seed"] = std::to_string(d.rng.master_seed);
    return echo;
}

struct ReplicateOutcome {
    bool ok = false;
    std::string error;
    std::vector<int> per_k;
    std::vector<int> fdr;
    int gap1 = 0;
    int gap2 = 0;
    int ch = 0;
    int db = 0;
    int sil = 0;
};

GapResult replicate_gap(const Dataset& data, const MethodConfig& method,
                        const ReferenceEnsemble& ensemble, const SignificanceReport& report,
                        const AnalyzeOptions& opts, const RngSpec& base) {
    if (method.method == Method::Agglomerative || method.method == Method::KMeans) {
        // Hard-clustering heterogeneity is the within-cluster inertia, so the
        // ensemble fits double as the gap statistic's reference dispersions.
        const int k_max = opts.k_max;
        const std::vector<double> w_data(report.h_data.H.begin(),
                                         report.h_data.H.begin() + k_max);
        return gap_from_w(w_data, ensemble.h_matrix.leftCols(k_max));
    }
    return gap_statistic(data, method, opts.k_max, opts.n_ref, opts.reference_type,
                         base.substream(3));
}

double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    const double mean_x = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double mean_y = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0;
    double sxx = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mean_x) * (y[i] - mean_y);
        sxx += (x[i] - mean_x) * (x[i] - mean_x);
    }
    if (sxx == 0.0) throw NumericError("scaling grid has zero spread in ln D");
    return sxy / sxx;
}

}  // namespace

LabeledDataset gen_blobs(const BlobSpec& spec) {
    if (spec.components < 1)
        throw DataError("blob spec needs at least 1 component, got " +
                        std::to_string(spec.components));
    if (!(spec.sigma_c > 0.0)) throw DataError("sigma_c must be positive");
    if (spec.box_halfwidth < 0.0) throw DataError("box_halfwidth must be nonnegative");
    if (spec.n < spec.components)
        throw DataError("N = " + std::to_string(spec.n) + " is smaller than M = " +
                        std::to_string(spec.components) + " components");
    if (spec.d < 1) throw DataError("D must be at least 1");

    RngStream rng(spec.rng);
    Matrix centers(spec.components, spec.d);
    for (Eigen::Index c = 0; c < centers.rows(); ++c)
        for (Eigen::Index j = 0; j < centers.cols(); ++j)
            centers(c, j) = rng.uniform(-spec.box_halfwidth, spec.box_halfwidth);

    Matrix points(spec.n, spec.d);
    std::vector<int> labels(static_cast<size_t>(spec.n));
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        const int component =
            static_cast<int>(rng.uniform_index(static_cast<size_t>(spec.components)));
        labels[static_cast<size_t>(i)] = component;
        for (Eigen::Index j = 0; j < points.cols(); ++j)
            points(i, j) = rng.normal(centers(component, j), spec.sigma_c);
    }
    return {Dataset(std::move(points)), std::move(labels)};
}

Dataset gen_unstructured(int n, int d, UnstructuredKind kind, double sigma, const RngSpec& rng_spec) {
    if (n < 2) throw DataError("N must be at least 2, got " + std::to_string(n));
    if (d < 1) throw DataError("D must be at least 1, got " + std::to_string(d));
    if (kind == UnstructuredKind::GaussianIso && !(sigma > 0.0))
        throw DataError("sigma must be positive");

    RngStream rng(rng_spec);
    Matrix out(n, d);
    for (Eigen::Index i = 0; i < out.rows(); ++i)
        for (Eigen::Index j = 0; j < out.cols(); ++j)
            out(i, j) = kind == UnstructuredKind::UniformBox01 ? rng.uniform01()
                                                               : rng.normal(0.0, sigma);
    return Dataset(std::move(out));
}

ExperimentResult run_table_experiment(const TableDesign& design) {
    if (design.replicates < 1) throw DataError("replicates must be positive");
    if (design.analysis.k_max < 2) throw DataError("k_max must be at least 2");

    std::vector<ReplicateOutcome> outcomes(static_cast<size_t>(design.replicates));
    parallel_for(static_cast<size_t>(design.replicates), [&](size_t rep) {
        ReplicateOutcome& out = outcomes[rep];
        try {
            const RngSpec base = design.rng.substream(rep);
            const Dataset data = make_table_data(design, base.substream(0));

            MethodConfig method = design.method;
            method.rng = base.substream(2);
            AnalyzeOptions opts = design.analysis;
            opts.rng = base.substream(1);

            const ReferenceEnsemble ensemble =
                build_ensemble(data, method, opts.k_max, opts.n_ref, opts.reference_type,
                               opts.rng.substream(1));
            const SignificanceReport report = analyze_against(data, method, ensemble, opts);
            out.per_k = report.per_k_significant;
            out.fdr = report.fdr_significant;

            if (design.run_baselines) {
                const GapResult gap = replicate_gap(data, method, ensemble, report, opts, base);
                out.gap1 = gap.k_hat_rule1;
                out.gap2 = gap.k_hat_rule2;
                out.ch = index_curve(data, method, opts.k_max, ValidityIndex::CalinskiHarabasz).k_hat;
                out.db = index_curve(data, method, opts.k_max, ValidityIndex::DaviesBouldin).k_hat;
                out.sil = index_curve(data, method, opts.k_max, ValidityIndex::Silhouette).k_hat;
            }
            out.ok = true;
        } catch (const std::exception& e) {
            out.ok = false;
            out.error = e.what();
        }
    });

    ExperimentResult result;
    result.design = table_design_echo(design);
    result.k_max = design.analysis.k_max;
    result.row_labels = {"elbowsig_per_k", "elbowsig_fdr"};
    if (design.run_baselines) {
        result.row_labels.insert(result.row_labels.end(),
                                 {"gap_rule1", "gap_rule2", "ch", "db", "silhouette"});
    }
    result.counts.assign(result.row_labels.size(),
                         std::vector<long>(static_cast<size_t>(result.k_max), 0));
    result.replicates_attempted = design.replicates;

    auto tally_set = [&](size_t row, const std::vector<int>& ks) {
        if (ks.empty()) {
            ++result.counts[row][0];  // "k = 1 (no structure)" convention
            return;
        }
        for (int k : ks) ++result.counts[row][static_cast<size_t>(k - 1)];
    };
    auto tally_one = [&](size_t row, int k) { ++result.counts[row][static_cast<size_t>(k - 1)]; };

    for (size_t rep = 0; rep < outcomes.size(); ++rep) {
        const ReplicateOutcome& out = outcomes[rep];
        if (!out.ok) {
            ++result.replicates_failed;
            result.failures.push_back("replicate " + std::to_string(rep) + ": " + out.error);
            continue;
        }
        tally_set(0, out.per_k);
        tally_set(1, out.fdr);
        if (design.run_baselines) {
            tally_one(2, out.gap1);
            tally_one(3, out.gap2);
            tally_one(4, out.ch);
            tally_one(5, out.db);
            tally_one(6, out.sil);
        }
    }
    return result;
}

ExperimentResult run_scaling_experiment(const ScalingDesign& design) {
    if (design.d_grid.size() < 3)
        throw DataError("scaling needs a D grid with at least 3 points");
    const auto [min_it, max_it] = std::minmax_element(design.d_grid.begin(), design.d_grid.end());
    if (*min_it < 1) throw DataError("D grid entries must be positive");
    if (static_cast<double>(*max_it) / static_cast<double>(*min_it) < 10.0)
        throw DataError("D grid must span at least one decade");
    if (design.k_probe < 2) throw DataError("k_probe must be at least 2");
    if (design.n < design.k_probe + 1)
        throw DataError("N must be at least k_probe + 1 to evaluate delta at k_probe");
    if (design.n_ref < 2) throw DataError("n_ref must be at least 2");
    if (design.methods.empty()) throw DataError("scaling needs at least one method");

    ExperimentResult result;
    result.design["experiment"] = "scaling";
    result.design["n"] = std::to_string(design.n);
    result.design["k_probe"] = std::to_string(design.k_probe);
    result.design["n_ref"] = std::to_string(design.n_ref);
    {
        std::string methods;
        for (const Method m : design.methods)
            methods += (methods.empty() ? "" : ",") + method_name(m);
        result.design["methods"] = methods;
        std::string grid;
        for (const int d : design.d_grid) grid += (grid.empty() ? "" : ",") + std::to_string(d);
        result.design["d_grid"] = grid;
    }
    result.design["seed"] = std::to_string(design.rng.master_seed);

    const size_t n_methods = design.methods.size();
    std::vector<std::vector<double>> log_d(n_methods), log_var(n_methods);
    for (size_t di = 0; di < design.d_grid.size(); ++di) {
        const int d = design.d_grid[di];
        const RngSpec d_stream = design.rng.substream(di);

        Matrix deltas(design.n_ref, static_cast<Eigen::Index>(n_methods));
        parallel_for(static_cast<size_t>(design.n_ref), [&](size_t r) {
            const RngSpec gen = d_stream.substream(2 * static_cast<std::uint64_t>(r));
            const RngSpec fit = d_stream.substream(2 * static_cast<std::uint64_t>(r) + 1);
            const Dataset data =
                gen_unstructured(design.n, d, UnstructuredKind::UniformBox01, 1.0, gen);
            for (size_t mi = 0; mi < n_methods; ++mi) {
                MethodConfig config = design.base_config;
                config.method = design.methods[mi];
                config.rng = fit.substream(mi);
                const HeterogeneitySequence H =
                    heterogeneity_sequence(data, config, design.k_probe);
                const ElbowSequence elbow = elbow_sequence(H);
                deltas(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(mi)) =
                    elbow.delta.back();  // k = k_probe
            }
        });

        for (size_t mi = 0; mi < n_methods; ++mi) {
            const auto column = deltas.col(static_cast<Eigen::Index>(mi));
            const double mean = column.mean();
            const double variance = (column.array() - mean).square().sum() /
                                    static_cast<double>(design.n_ref - 1);
            result.scaling.push_back({method_name(design.methods[mi]), d, mean, variance});
            if (!(variance > 0.0))
                throw NumericError("zero variance of delta at D=" + std::to_string(d) +
                                   " for method " + method_name(design.methods[mi]));
            log_d[mi].push_back(std::log(static_cast<double>(d)));
            log_var[mi].push_back(std::log(variance));
        }
    }

    for (size_t mi = 0; mi < n_methods; ++mi)
        result.scaling_slopes[method_name(design.methods[mi])] = ols_slope(log_d[mi], log_var[mi]);
    return result;
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream stream(text);
    std::string line;
    int line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string trimmed = trim(line);
        if (trimmed.empty()) continue;
        const size_t eq = trimmed.find('=');
        if (eq == std::string::npos)
            throw DataError("config line " + std::to_string(line_no) +
                            ": expected 'key = value', got '" + trimmed + "'");
        const std::string key = trim(trimmed.substr(0, eq));
        const std::string value = trim(trimmed.substr(eq + 1));
        if (key.empty())
            throw DataError("config line " + std::to_string(line_no) + ": empty key");
        if (kv.count(key) != 0)
            throw DataError("config line " + std::to_string(line_no) + ": duplicate key '" +
                            key + "'");
        kv[key] = value;
    }
    return kv;
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open config file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

namespace {

class ConfigReader {
  public:
    explicit ConfigReader(const std::map<std::string, std::string>& kv) : kv_(kv) {}

    std::string get_string(const std::string& key, const std::string& fallback) {
        used_.insert(key);
        const auto it = kv_.find(key);
        return it == kv_.end() ? fallback : it->second;
    }

    int get_int(const std::string& key, int fallback) {
        const std::string raw = get_string(key, std::to_string(fallback));
        try {
            size_t pos = 0;
            const long long value = std::stoll(raw, &pos);
            if (pos != raw.size()) throw std::invalid_argument(raw);
            return static_cast<int>(value);
        } catch (const std::exception&) {
            throw DataError("config key '" + key + "': expected an integer, got '" + raw + "'");
        }
    }

    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) {
        const std::string raw = get_string(key, std::to_string(fallback));
        try {
            size_t pos = 0;
            const std::uint64_t value = std::stoull(raw, &pos);
            if (pos != raw.size()) throw std::invalid_argument(raw);
            return value;
        } catch (const std::exception&) {
            throw DataError("config key '" + key +
                            "': expected a nonnegative integer, got '" + raw + "'");
        }
    }

    double get_double(const std::string& key, double fallback) {
        used_.insert(key);
        const auto it = kv_.find(key);
        if (it == kv_.end()) return fallback;
        try {
            size_t pos = 0;
            const double value = std::stod(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument(it->second);
            return value;
        } catch (const std::exception&) {
            throw DataError("config key '" + key + "': expected a number, got '" + it->second +
                            "'");
        }
    }

    bool get_bool(const std::string& key, bool fallback) {
        const std::string raw = get_string(key, fallback ? "true" : "false");
        if (raw == "true") return true;
        if (raw == "false") return false;
        throw DataError("config key '" + key + "': expected true or false, got '" + raw + "'");
    }

    void reject_unknown() const {
        for (const auto& [key, value] : kv_)
            if (used_.find(key) == used_.end())
                throw DataError("unknown config key '" + key + "'");
    }

  private:
    const std::map<std::string, std::string>& kv_;
    std::set<std::string> used_;
};

MethodConfig method_config_from(ConfigReader& reader) {
    MethodConfig method;
    method.method = method_from_name(reader.get_string("method", "agglomerative"));
    method.fuzzifier = reader.get_double("fuzzifier", 2.0);
    method.max_iter = reader.get_int("max_iter", 300);
    method.tol = reader.get_double("tol", 1e-6);
    method.n_init = reader.get_int("n_init", 1);
    method.covariance_reg = reader.get_double("covariance_reg", 0.0);
    return method;
}

}  // namespace

std::string design_kind(const std::map<std::string, std::string>& kv) {
    const auto it = kv.find("experiment");
    const std::string kind = it == kv.end() ? "table" : it->second;
    if (kind != "table" && kind != "scaling")
        throw DataError("config key 'experiment' must be table or scaling, got '" + kind + "'");
    return kind;
}

TableDesign table_design_from_config(const std::map<std::string, std::string>& kv) {
    ConfigReader reader(kv);
    if (reader.get_string("experiment", "table") != "table")
        throw DataError("config does not describe a table experiment");

    TableDesign design;
    design.replicates = reader.get_int("replicates", 100);
    const std::string generator = reader.get_string("generator", "blobs");
    if (generator == "blobs")
        design.generator = GeneratorKind::Blobs;
    else if (generator == "uniform")
        design.generator = GeneratorKind::UniformBox01;
    else if (generator == "gaussian")
        design.generator = GeneratorKind::GaussianIso;
    else
        throw DataError("config key 'generator' must be blobs, uniform, or gaussian, got '" +
                        generator + "'");
    design.n = reader.get_int("n", 200);
    design.d = reader.get_int("d", 2);
    design.components = reader.get_int("components", 3);
    design.sigma_c = reader.get_double("sigma_c", 1.0);
    design.box_halfwidth = reader.get_double("box_halfwidth", 10.0);
    design.sigma = reader.get_double("sigma", 1.0);
    design.method = method_config_from(reader);
    design.analysis.reference_type =
        reference_type_from_name(reader.get_string("reference", "bbox"));
    design.analysis.k_max = reader.get_int("k_max", 10);
    design.analysis.n_ref = reader.get_int("n_ref", 200);
    design.analysis.q1 = reader.get_double("q1", 0.05);
    design.analysis.q2 = reader.get_double("q2", 0.05);
    design.analysis.s_sig = reader.get_int("s_sig", 50);
    design.analysis.f_sel = reader.get_double("f_sel", 0.5);
    design.run_baselines = reader.get_bool("run_baselines", true);
    design.rng = RngSpec{reader.get_u64("seed", 0), 0};
    reader.reject_unknown();
    return design;
}

ScalingDesign scaling_design_from_config(const std::map<std::string, std::string>& kv) {
    ConfigReader reader(kv);
    if (reader.get_string("experiment", "table") != "scaling")
        throw DataError("config does not describe a scaling experiment");

    ScalingDesign design;
    design.n = reader.get_int("n", 30);
    design.k_probe = reader.get_int("k_probe", 3);
    design.n_ref = reader.get_int("n_ref", 200);

    const std::string methods = reader.get_string("methods", "kmeans,agglomerative,fcm");
    design.methods.clear();
    std::istringstream method_stream(methods);
    std::string token;
    while (std::getline(method_stream, token, ','))
        design.methods.push_back(method_from_name(trim(token)));

    const std::string grid = reader.get_string("d_grid", "8,16,32,64,128");
    design.d_grid.clear();
    std::istringstream grid_stream(grid);
    while (std::getline(grid_stream, token, ',')) {
        try {
            size_t pos = 0;
            const int value = std::stoi(trim(token), &pos);
            if (pos != trim(token).size()) throw std::invalid_argument(token);
            design.d_grid.push_back(value);
        } catch (const std::exception&) {
            throw DataError("config key 'd_grid': expected comma-separated integers, got '" +
                            grid + "'");
        }
    }

    design.base_config = method_config_from(reader);
    design.rng = RngSpec{reader.get_u64("seed", 0), 0};
    reader.reject_unknown();
    return design;
}

}  // namespace elbowsig
