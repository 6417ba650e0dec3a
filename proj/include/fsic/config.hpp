#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fsic/scenario.hpp"

namespace fsic {

inline constexpr const char* kLibraryVersion = "0.1.0";

enum class ExperimentKind { Simulate, Picard, Certificate, Sweep, Audit };

ExperimentKind experiment_kind_from_string(const std::string& name);
std::string to_string(ExperimentKind kind);

// Flat key = value configuration with [section] headers. Sections: problem,
// noise, impulses, inclusion, control, run. Unknown keys are errors; all
// physical parameters are range-checked.
struct RunConfig {
  // [problem]
  double alpha = std::numeric_limits<double>::quiet_NaN();
  double b = std::numeric_limits<double>::quiet_NaN();
  double a = 0.0;
  int n_modes = 0;
  std::string phi_profile = "constant";  // constant | linear
  std::vector<double> phi_coeffs;
  double phi_slope = 0.0;
  std::vector<double> xi_coeffs;
  std::vector<double> h_taus;
  std::vector<double> h_coeffs;
  std::string f1_form = "zero";  // zero | linear | example_5_1
  double f1_param = 1.0;
  std::string f2_form = "zero";
  double f2_param = 1.0;
  std::string varrho_form = "zero";  // zero | constant | elapsed
  double varrho_param = 1.0;
  double nu1_lag = 0.0, nu2_lag = 0.0, nu3_lag = 0.0;
  double L_f1 = HypothesisConstants::unset;
  double k1 = HypothesisConstants::unset;
  double k2 = HypothesisConstants::unset;
  double L_f2 = HypothesisConstants::unset;
  double L_h = HypothesisConstants::unset;
  double ell = HypothesisConstants::unset;
  double w_hat = HypothesisConstants::unset;
  double wp = HypothesisConstants::unset;
  double theta = HypothesisConstants::unset;
  double pounds0 = 1.0, pounds1 = 0.0;
  double beta0 = 1.0, beta1 = 0.0;

  // [noise]
  std::vector<double> q_coeffs;

  // [impulses]
  std::vector<double> impulse_points;
  std::vector<double> impulse_beta;      // integral-kernel constants for I_p
  std::vector<double> impulse_beta_hat;  // for J_p
  std::vector<double> L_I;
  std::vector<double> L_J;

  // [inclusion]
  std::string inclusion_form = "none";  // none | degenerate_linear | example_5_1
  double inclusion_param1 = 0.0;
  double inclusion_param2 = 0.0;

  // [control]
  std::vector<double> target_coeffs;
  std::vector<double> deltas = {1.0, 0.1, 0.01};
  double delta = 1.0;

  // [run]
  std::string scenario;  // preset reference; empty for inline scenarios
  ExperimentKind kind = ExperimentKind::Simulate;
  int steps = 0;
  int samples = 0;
  std::optional<std::uint64_t> seed;
  std::string selection = "midpoint";
  std::uint64_t selection_seed = 0;
  std::string out_dir = "out";
  int dump_samples = 16;
  double tol = 1e-9;
  int max_iter = 80;
  double relaxation = 0.0;
  int audit_samples = 200;

  bool operator==(const RunConfig& other) const;

  void validate() const;
  ScenarioSpec build_scenario() const;
};

// Parses configuration text; resolves a preset reference when [run] scenario
// is set (the referencing file may then only contain the run section).
RunConfig parse_config(const std::string& text);

// Canonical rendering; parse_config(render(cfg)) == cfg for valid configs.
std::string render(const RunConfig& cfg);

// Shipped presets.
std::vector<std::string> preset_names();
const std::string& preset_text(const std::string& name);  // throws ValidationError

}  // namespace fsic
