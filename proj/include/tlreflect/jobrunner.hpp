#pragma once

#include <string_view>

#include <nlohmann/json.hpp>

#include "tlreflect/kfactory.hpp"

namespace tlr {

inline constexpr std::string_view kToolName = "tlreflect";
inline constexpr std::string_view kToolVersion = "0.1.0";

/// A batch job: which model, which K-matrix plan, which seeds, which tasks.
/// Parsed from the JSON config documented in docs/job-schema.json.
struct JobConfig {
  ModelSpec model;
  std::optional<KBlockPlan> plan;
  std::vector<std::uint64_t> seeds = {1};
  Tolerance tol;
  std::vector<std::string> tasks; // dependency order is enforced internally
  int parallel = 1;
};

/// Throws Error{ConfigInvalid} on any malformed or inconsistent input.
JobConfig parse_config(const nlohmann::json& json);

struct RunResult {
  nlohmann::ordered_json report;
  bool all_pass = false;
};

/// Executes the requested tasks in dependency order
/// (validate -> tl/ybe -> sample -> reflect/components -> moduli) and returns
/// the machine-readable report. Task failures are recorded in the report,
/// not thrown; only configuration problems throw.
RunResult run_job(const JobConfig& config);

/// One human-readable line per task entry plus an overall verdict.
std::string summarize(const nlohmann::ordered_json& report);

/// Full-precision decimal formatting used for every residual in the report.
std::string format_residual(double value);

} // namespace tlr
