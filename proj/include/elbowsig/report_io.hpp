#pragma once

#include "elbowsig/baselines.hpp"
#include "elbowsig/inference.hpp"
#include "elbowsig/simstudy.hpp"

#include <map>
#include <string>
#include <vector>

namespace elbowsig {

inline constexpr const char* kReportSchema = "elbowsig.report/1";
inline constexpr const char* kExperimentSchema = "elbowsig.experiment/1";
inline constexpr const char* kBaselinesSchema = "elbowsig.baselines/1";

/// Schema-versioned JSON document; byte-identical across reruns with the same
/// seeds (it carries no timestamp).
std::string report_to_json(const SignificanceReport& report);

/// Tidy CSV with columns k,H,delta,p,significant_per_k,significant_fdr over
/// k = 1..k_max+1; cells undefined at a given k are left empty.
std::string report_to_csv(const SignificanceReport& report);

/// Schema-versioned JSON document. A non-empty timestamp is recorded as the
/// single non-deterministic metadata field.
std::string experiment_to_json(const ExperimentResult& result,
                               const std::string& timestamp = "");

/// Tidy CSV of the replicate tallies: method,k,count.
std::string experiment_counts_csv(const ExperimentResult& result);

/// Tidy CSV of the scaling sweep: method,d,mean_delta,var_delta.
std::string experiment_scaling_csv(const ExperimentResult& result);

/// Schema-versioned JSON for the classical selectors (gap statistic plus
/// validity-index curves); metadata is echoed verbatim.
std::string baselines_to_json(const GapResult& gap, const std::vector<IndexCurve>& curves,
                              const std::map<std::string, std::string>& metadata);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace elbowsig
