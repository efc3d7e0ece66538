#pragma once

#include <string>
#include <vector>

namespace sigma2x::chain {

// Engine tolerances used by the verification steps.  Step acceptance
// tolerances are fixed per step class (constant 1e-12, 1D 1e-10, 2D 1e-8,
// 3D 1e-6 relative) and sit one order above the engine targets so estimate
// slack is absorbed; tol_scale scales the acceptance thresholds uniformly.
struct EngineConfig {
  double rel_tol_3d = 1e-7;   // 3D cubature relative target
  double rel_tol_2d = 1e-9;   // 2D cubature relative target
  double rel_tol_x5 = 1e-8;   // the two headline triple integrals
  double scale_1d = 1.0;      // scales the per-step 1D quadrature targets
  double tol_scale = 1.0;     // scales step acceptance tolerances
  long max_evals = 100'000'000;
  int threads = 1;
};

struct StepOutcome {
  std::string id;
  std::string paper_ref;

  double computed_value = 0.0;
  double computed_error = 0.0;
  long n_evals = 0;
  double wall_ms = 0.0;
  std::string strategy;

  std::string expected_expression;
  double expected_value = 0.0;

  std::string best_factor = "1";  // symbolic label, e.g. "2", "1/pi^2"
  double best_factor_value = 1.0;
  double relative_deviation = 0.0;

  std::string status;  // "pass" | "discrepancy" | "fail"
  std::string note;    // text rendering only; not part of the report schema
};

struct VerificationReport {
  std::vector<StepOutcome> steps;  // in chain order
  std::string verdict;             // "pass" | "fail"
  bool passed() const { return verdict == "pass"; }
};

// Stable step names in chain order.
const std::vector<std::string>& all_step_ids();
bool has_step(const std::string& id);

// Runs the selected steps (any order given; executed in chain order,
// duplicates ignored).  Each step computes everything it needs; integrals
// shared between steps are evaluated once through an internal cache.
// Throws std::invalid_argument on an empty selection and std::out_of_range
// on an unknown step id.
VerificationReport run_chain(const std::vector<std::string>& selection,
                             const EngineConfig& cfg = {});
VerificationReport run_all(const EngineConfig& cfg = {});

std::string render_text(const VerificationReport& report);
// Schema 1: {"schema_version","timestamp","steps":[{"id","paper_ref",
// "computed":{"value","error_estimate","n_evals","wall_ms","strategy"},
// "expected":{"expression","value"},"probe":{"candidates","best_factor",
// "relative_deviation"},"status"}],"verdict"}.
std::string render_json(const VerificationReport& report);

}  // namespace sigma2x::chain
