#pragma once

#include <optional>
#include <string>

#include "ihf/config.hpp"
#include "ihf/solver.hpp"
#include "json.hpp"

namespace ihf {

// 0: converged, no violations; 1: violations; 2: not converged (solver,
// exhaustion or classification); 3: configuration error.
enum ExitCode : int { kExitOk = 0, kExitViolations = 1, kExitNotConverged = 2, kExitConfig = 3 };

struct PipelineResult {
  nlohmann::json report;
  int exit_code = kExitOk;
  std::optional<SolutionField> field;
};

// Bounded or exterior solve followed by profile, blow-down, classification
// and the enabled checks. Writes report.json, the CSV series and field.txt
// into config.out unless it is empty.
PipelineResult run_pipeline(const RunConfig& config);

// Profile, blow-down and classification of a stored field.
PipelineResult run_classify(const RunConfig& config, const SolutionField& u);

// Enabled checks on a stored field; other, when given, is the second field
// of the comparison check.
PipelineResult run_verify(const RunConfig& config, const SolutionField& u, const SolutionField* other = nullptr);

// solve_dirichlet against oracle_solve on the bounded domain of config.
PipelineResult run_oracle_compare(const RunConfig& config);

// Bounded solves over config.sweep_h (default 0.1, 0.05, 0.025) with stencil
// width round(m0 sqrt(h0 / h)); max error against config.exact.
PipelineResult run_sweep(const RunConfig& config);

// Writes report.json plus the CSV series present in the report.
void write_report(const std::string& dir, const nlohmann::json& report);

// Report with the timing block removed; what determinism guarantees cover.
nlohmann::json without_timings(nlohmann::json report);

// Text field file: a "dim h R" header, then one "index value" line per live
// node in node order. Values use the shortest round-trip decimal form.
void write_field(const std::string& path, const SolutionField& u);
// The domain is rebuilt from config with dim, h and R taken from the header.
SolutionField read_field(const std::string& path, const RunConfig& config);

// Domain spec of a run: the bounded grid, or the exterior grid at radius R.
GridSpec run_grid(const RunConfig& config, double radius);

}  // namespace ihf
