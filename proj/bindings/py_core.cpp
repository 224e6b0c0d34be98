// Python bindings for the elbowsig core. Thin wrappers only: enums travel as
// strings, matrices as NumPy arrays, and reports keep their C++ layout plus
// to_json()/to_csv() serializers.

#include "elbowsig/baselines.hpp"
#include "elbowsig/clustering.hpp"
#include "elbowsig/dataset.hpp"
#include "elbowsig/elbow.hpp"
#include "elbowsig/inference.hpp"
#include "elbowsig/parallel.hpp"
#include "elbowsig/report_io.hpp"
#include "elbowsig/simstudy.hpp"
#include "elbowsig/theory.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <string>
#include <utility>
#include <vector>

namespace py = pybind11;
using namespace elbowsig;

namespace {

MethodConfig make_config(const std::string& method, double fuzzifier, int max_iter, double tol,
                         int n_init, double covariance_reg, const RngSpec& rng) {
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

AnalyzeOptions make_options(int k_max, int n_ref, const std::string& reference, double q1,
                            double q2, int s_sig, double f_sel, const RngSpec& rng) {
    AnalyzeOptions options;
    options.k_max = k_max;
    options.n_ref = n_ref;
    options.reference_type = reference_type_from_name(reference);
    options.q1 = q1;
    options.q2 = q2;
    options.s_sig = s_sig;
    options.f_sel = f_sel;
    options.rng = rng;
    return options;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Statistical significance for the clustering elbow";

    py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

    py::class_<RngSpec>(m, "RngSpec", "Deterministic stream identifier")
        .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("master_seed") = 0,
             py::arg("stream_id") = 0)
        .def_readwrite("master_seed", &RngSpec::master_seed)
        .def_readwrite("stream_id", &RngSpec::stream_id)
        .def("substream", &RngSpec::substream, py::arg("index"))
        .def("__repr__", [](const RngSpec& spec) {
            return "RngSpec(master_seed=" + std::to_string(spec.master_seed) +
                   ", stream_id=" + std::to_string(spec.stream_id) + ")";
        });

    py::class_<Dataset>(m, "Dataset", "Immutable N x D observation matrix")
        .def(py::init([](const Matrix& values, std::vector<std::string> names) {
                 return Dataset(values, std::move(names));
             }),
             py::arg("values"), py::arg("feature_names") = std::vector<std::string>{})
        .def_property_readonly("values", [](const Dataset& d) { return d.values(); })
        .def_property_readonly("feature_names",
                               [](const Dataset& d) { return d.feature_names(); })
        .def_property_readonly("n_rows", [](const Dataset& d) { return d.n_rows(); })
        .def_property_readonly("n_cols", [](const Dataset& d) { return d.n_cols(); })
        .def("__repr__", [](const Dataset& d) {
            return "Dataset(" + std::to_string(d.n_rows()) + " x " + std::to_string(d.n_cols()) +
                   ")";
        });

    m.def("load_csv", &load_csv, py::arg("path"), py::arg("has_header") = false);
    m.def("write_csv", &write_csv, py::arg("data"), py::arg("path"));
    m.def("standardized", &standardized, py::arg("data"));
    m.def(
        "column_ranges",
        [](const Dataset& data) {
            std::vector<std::pair<double, double>> out;
            for (const FeatureRange& range : column_ranges(data))
                out.emplace_back(range.lo, range.hi);
            return out;
        },
        py::arg("data"));

    py::class_<MethodConfig>(m, "MethodConfig")
        .def(py::init(&make_config), py::arg("method") = "kmeans", py::arg("fuzzifier") = 2.0,
             py::arg("max_iter") = 300, py::arg("tol") = 1e-6, py::arg("n_init") = 1,
             py::arg("covariance_reg") = 0.0, py::arg("rng") = RngSpec{})
        .def_property(
            "method", [](const MethodConfig& c) { return method_name(c.method); },
            [](MethodConfig& c, const std::string& name) { c.method = method_from_name(name); })
        .def_readwrite("fuzzifier", &MethodConfig::fuzzifier)
        .def_readwrite("max_iter", &MethodConfig::max_iter)
        .def_readwrite("tol", &MethodConfig::tol)
        .def_readwrite("n_init", &MethodConfig::n_init)
        .def_readwrite("covariance_reg", &MethodConfig::covariance_reg)
        .def_readwrite("rng", &MethodConfig::rng);

    py::class_<ClusteringOutcome>(m, "ClusteringOutcome")
        .def_readonly("k", &ClusteringOutcome::k)
        .def_readonly("hard_labels", &ClusteringOutcome::hard_labels)
        .def_readonly("centroids", &ClusteringOutcome::centroids)
        .def_readonly("memberships", &ClusteringOutcome::memberships)
        .def_readonly("weights", &ClusteringOutcome::weights)
        .def_readonly("covariances", &ClusteringOutcome::covariances)
        .def_readonly("heterogeneity", &ClusteringOutcome::heterogeneity)
        .def_readonly("iterations", &ClusteringOutcome::iterations)
        .def_readonly("objective_trace", &ClusteringOutcome::objective_trace);

    py::class_<Dendrogram>(m, "Dendrogram")
        .def_readonly("n_points", &Dendrogram::n_points)
        .def_property_readonly("merges", [](const Dendrogram& d) {
            std::vector<std::tuple<int, int, double>> out;
            for (const Dendrogram::Merge& merge : d.merges)
                out.emplace_back(merge.left, merge.right, merge.height);
            return out;
        });

    m.def("ward_dendrogram", &ward_dendrogram, py::arg("data"));
    m.def("cut_dendrogram", &cut_dendrogram, py::arg("dendrogram"), py::arg("k"));
    m.def(
        "partition_inertia",
        [](const Matrix& points, const std::vector<int>& labels, int k) {
            Matrix centroids;
            const double inertia = partition_inertia(points, labels, k, &centroids);
            return py::make_tuple(inertia, centroids);
        },
        py::arg("points"), py::arg("labels"), py::arg("k"),
        "Returns (inertia, centroids) of a hard partition");
    m.def("kmeans", &kmeans, py::arg("data"), py::arg("k"), py::arg("config"));
    m.def("fcm", &fcm, py::arg("data"), py::arg("k"), py::arg("config"));
    m.def("gmm_em", &gmm_em, py::arg("data"), py::arg("k"), py::arg("config"));

    py::class_<HeterogeneitySequence>(m, "HeterogeneitySequence")
        .def_property_readonly(
            "method", [](const HeterogeneitySequence& h) { return method_name(h.method); })
        .def_readonly("k_values", &HeterogeneitySequence::k_values)
        .def_readonly("H", &HeterogeneitySequence::H);

    m.def("heterogeneity_sequence", &heterogeneity_sequence, py::arg("data"), py::arg("config"),
          py::arg("k_max"));

    py::class_<ElbowSequence>(m, "ElbowSequence")
        .def_readonly("k_values", &ElbowSequence::k_values)
        .def_readonly("delta", &ElbowSequence::delta)
        .def_readonly("degenerate_flags", &ElbowSequence::degenerate_flags);

    m.def("elbow_sequence",
          py::overload_cast<const std::vector<double>&>(&elbow_sequence), py::arg("H"));
    m.def("elbow_sequence",
          py::overload_cast<const HeterogeneitySequence&>(&elbow_sequence),
          py::arg("heterogeneity"));

    m.def("gen_bbox_uniform", &gen_bbox_uniform, py::arg("data"), py::arg("rng"));
    m.def("gen_pca_uniform", &gen_pca_uniform, py::arg("data"), py::arg("rng"));

    py::class_<ReferenceEnsemble>(m, "ReferenceEnsemble")
        .def_property_readonly(
            "reference_type",
            [](const ReferenceEnsemble& e) { return reference_type_name(e.reference_type); })
        .def_readonly("n_ref", &ReferenceEnsemble::n_ref)
        .def_readonly("k_values", &ReferenceEnsemble::k_values)
        .def_readonly("delta_matrix", &ReferenceEnsemble::delta_matrix)
        .def_readonly("h_matrix", &ReferenceEnsemble::h_matrix);

    m.def(
        "build_ensemble",
        [](const Dataset& data, const MethodConfig& config, int k_max, int n_ref,
           const std::string& reference, const RngSpec& rng) {
            return build_ensemble(data, config, k_max, n_ref,
                                  reference_type_from_name(reference), rng);
        },
        py::arg("data"), py::arg("config"), py::arg("k_max"), py::arg("n_ref"),
        py::arg("reference"), py::arg("rng"));

    py::class_<PValueSequence>(m, "PValueSequence")
        .def_readonly("k_values", &PValueSequence::k_values)
        .def_readonly("p", &PValueSequence::p);

    py::class_<ThresholdCalibration>(m, "ThresholdCalibration")
        .def_readonly("q1", &ThresholdCalibration::q1)
        .def_readonly("s_sig", &ThresholdCalibration::s_sig)
        .def_readonly("f_sel", &ThresholdCalibration::f_sel)
        .def_readonly("k_values", &ThresholdCalibration::k_values)
        .def_readonly("p_thr_per_k", &ThresholdCalibration::p_thr_per_k)
        .def_readonly("p_sig", &ThresholdCalibration::p_sig);

    py::class_<AnalyzeOptions>(m, "AnalyzeOptions")
        .def(py::init(&make_options), py::arg("k_max") = 10, py::arg("n_ref") = 200,
             py::arg("reference") = "bbox", py::arg("q1") = 0.05, py::arg("q2") = 0.05,
             py::arg("s_sig") = 50, py::arg("f_sel") = 0.5, py::arg("rng") = RngSpec{})
        .def_readwrite("k_max", &AnalyzeOptions::k_max)
        .def_readwrite("n_ref", &AnalyzeOptions::n_ref)
        .def_property(
            "reference",
            [](const AnalyzeOptions& o) { return reference_type_name(o.reference_type); },
            [](AnalyzeOptions& o, const std::string& name) {
                o.reference_type = reference_type_from_name(name);
            })
        .def_readwrite("q1", &AnalyzeOptions::q1)
        .def_readwrite("q2", &AnalyzeOptions::q2)
        .def_readwrite("s_sig", &AnalyzeOptions::s_sig)
        .def_readwrite("f_sel", &AnalyzeOptions::f_sel)
        .def_readwrite("rng", &AnalyzeOptions::rng);

    py::class_<SignificanceReport>(m, "SignificanceReport")
        .def_readonly("method", &SignificanceReport::method)
        .def_readonly("reference_type", &SignificanceReport::reference_type)
        .def_readonly("n_ref", &SignificanceReport::n_ref)
        .def_readonly("k_max", &SignificanceReport::k_max)
        .def_readonly("q2", &SignificanceReport::q2)
        .def_readonly("heterogeneity", &SignificanceReport::h_data)
        .def_readonly("elbow", &SignificanceReport::delta_data)
        .def_readonly("p_values", &SignificanceReport::p_values)
        .def_readonly("calibration", &SignificanceReport::calibration)
        .def_readonly("per_k_significant", &SignificanceReport::per_k_significant)
        .def_readonly("fdr_significant", &SignificanceReport::fdr_significant)
        .def_readonly("monotonicity_violations", &SignificanceReport::monotonicity_violations)
        .def("to_json", &report_to_json)
        .def("to_csv", &report_to_csv);

    m.def("empirical_pvalues", &empirical_pvalues, py::arg("delta_data"), py::arg("ensemble"));
    m.def("calibrate_threshold", &calibrate_threshold, py::arg("ensemble"), py::arg("q1"),
          py::arg("s_sig"), py::arg("f_sel"), py::arg("rng"));
    m.def("bh_fdr", &bh_fdr, py::arg("p_values"), py::arg("q2"));
    m.def("analyze", &analyze, py::arg("data"), py::arg("config"), py::arg("options"));
    m.def("analyze_against", &analyze_against, py::arg("data"), py::arg("config"),
          py::arg("ensemble"), py::arg("options"));

    m.def("predicted_delta_large_n", &predicted_delta_large_n, py::arg("d"), py::arg("k"));
    m.def("predicted_delta_fcm", &predicted_delta_fcm, py::arg("k"), py::arg("m"));
    m.def("predicted_delta_gmm", &predicted_delta_gmm, py::arg("k"));

    py::class_<GapResult>(m, "GapResult")
        .def_readonly("k_values", &GapResult::k_values)
        .def_readonly("gap", &GapResult::gap)
        .def_readonly("s_k", &GapResult::s_k)
        .def_readonly("k_hat_rule1", &GapResult::k_hat_rule1)
        .def_readonly("k_hat_rule2", &GapResult::k_hat_rule2)
        .def_readonly("rule1_defaulted", &GapResult::rule1_defaulted);

    m.def(
        "gap_statistic",
        [](const Dataset& data, const MethodConfig& config, int k_max, int n_ref,
           const std::string& reference, const RngSpec& rng) {
            return gap_statistic(data, config, k_max, n_ref,
                                 reference_type_from_name(reference), rng);
        },
        py::arg("data"), py::arg("config"), py::arg("k_max"), py::arg("n_ref"),
        py::arg("reference"), py::arg("rng"));

    py::class_<IndexCurve>(m, "IndexCurve")
        .def_property_readonly("index",
                               [](const IndexCurve& c) { return validity_index_name(c.index); })
        .def_readonly("k_values", &IndexCurve::k_values)
        .def_readonly("scores", &IndexCurve::scores)
        .def_readonly("k_hat", &IndexCurve::k_hat);

    m.def(
        "index_curve",
        [](const Dataset& data, const MethodConfig& config, int k_max,
           const std::string& index) {
            return index_curve(data, config, k_max, validity_index_from_name(index));
        },
        py::arg("data"), py::arg("config"), py::arg("k_max"), py::arg("index"));
    m.def("calinski_harabasz", &calinski_harabasz, py::arg("data"), py::arg("labels"));
    m.def("davies_bouldin", &davies_bouldin, py::arg("data"), py::arg("labels"));
    m.def("silhouette", &silhouette, py::arg("data"), py::arg("labels"));

    m.def(
        "gen_blobs",
        [](int n, int d, int components, double sigma_c, double box_halfwidth,
           const RngSpec& rng) {
            BlobSpec spec;
            spec.n = n;
            spec.d = d;
            spec.components = components;
            spec.sigma_c = sigma_c;
            spec.box_halfwidth = box_halfwidth;
            spec.rng = rng;
            LabeledDataset out = gen_blobs(spec);
            return py::make_tuple(std::move(out.data), std::move(out.true_labels));
        },
        py::arg("n"), py::arg("d"), py::arg("components"), py::arg("sigma_c") = 1.0,
        py::arg("box_halfwidth") = 10.0, py::arg("rng") = RngSpec{},
        "Returns (dataset, true_labels)");
    m.def(
        "gen_unstructured",
        [](int n, int d, const std::string& kind, double sigma, const RngSpec& rng) {
            const UnstructuredKind parsed = [&] {
                if (kind == "uniform") return UnstructuredKind::UniformBox01;
                if (kind == "gaussian") return UnstructuredKind::GaussianIso;
                throw DataError("unknown unstructured kind '" + kind +
                                "' (expected uniform or gaussian)");
            }();
            return gen_unstructured(n, d, parsed, sigma, rng);
        },
        py::arg("n"), py::arg("d"), py::arg("kind") = "uniform", py::arg("sigma") = 1.0,
        py::arg("rng") = RngSpec{});

    m.def("set_max_threads", &parallel::set_max_threads, py::arg("n"));
    m.def("max_threads", &parallel::max_threads);
}
