#include "fsic/experiment.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>

#include "fsic/control.hpp"
#include "fsic/mild_solver.hpp"

namespace fsic {

namespace {

using nlohmann::ordered_json;

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_csv(const std::filesystem::path& path, const TimeGrid& grid,
               const std::vector<Trajectory>& kept, int n) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "sample,node_index,time";
  for (int m = 1; m <= n; ++m) out << ",mode_" << m;
  out << ",is_post_impulse\n";
  for (std::size_t s = 0; s < kept.size(); ++s) {
    for (int k = 0; k < grid.num_nodes(); ++k) {
      out << s << ',' << k << ',' << fmt17(grid.time(k));
      for (int m = 0; m < n; ++m) out << ',' << fmt17(kept[s].states[k].c[m]);
      out << ',' << (grid.nodes[k].kind == TimeGrid::NodeKind::PostImpulse ? 1 : 0)
          << '\n';
    }
  }
}

ordered_json json_estimate(const MonteCarloEstimate& est) {
  return ordered_json{{"mean", est.mean},
                      {"std_error", est.std_error},
                      {"samples", est.samples},
                      {"seed", est.seed}};
}

ordered_json json_picard(const PicardReport& rep) {
  return ordered_json{{"iterations", rep.iterations},
                      {"final_gap", rep.final_gap},
                      {"converged", rep.converged},
                      {"empirical_rate", rep.empirical_rate}};
}

ordered_json json_certificate(const ContractionCertificate& cert) {
  return ordered_json{{"Lambda", cert.Lambda},
                      {"delta", cert.delta},
                      {"lhs", cert.lhs},
                      {"satisfied", cert.satisfied}};
}

}  // namespace

ExperimentResult run_experiment(const RunConfig& cfg) {
  const auto t_start = std::chrono::steady_clock::now();
  cfg.validate();
  const ScenarioSpec scn = cfg.build_scenario();
  const TimeGrid grid = TimeGrid::make(scn.horizon, cfg.steps, scn.impulse_points());

  auto fam = std::make_shared<FractionalFamilies>(scn.r(), scn.n_modes);
  fam->prime_grid(grid);
  const MildSolver solver(scn, grid, fam);
  const BoundConstants bc = bound_constants(*fam, scn.horizon);

  SolverOptions opts;
  opts.tol = cfg.tol;
  opts.max_iter = cfg.max_iter;
  opts.selection.kind = selection_kind_from_string(cfg.selection);
  opts.selection.seed = cfg.selection_seed;
  opts.relaxation = cfg.relaxation;

  const std::uint64_t seed = *cfg.seed;

  ordered_json summary;
  summary["library_version"] = kLibraryVersion;
  summary["experiment"] = to_string(cfg.kind);
  summary["seed"] = seed;
  summary["scenario"] = ordered_json{{"name", cfg.scenario.empty() ? "inline" : cfg.scenario},
                                     {"alpha", scn.alpha},
                                     {"b", scn.horizon},
                                     {"a", scn.history},
                                     {"n_modes", scn.n_modes},
                                     {"steps", cfg.steps},
                                     {"samples", cfg.samples},
                                     {"selection", cfg.selection},
                                     {"text", render(cfg)}};
  summary["bound_constants"] = ordered_json{
      {"M1", bc.M1}, {"M2", bc.M2}, {"M3", bc.M3}, {"M4", bc.M4}};

  std::vector<Trajectory> kept;
  std::optional<PicardReport> failure;

  switch (cfg.kind) {
    case ExperimentKind::Simulate:
    case ExperimentKind::Picard: {
      EnsembleResult res =
          solve_ensemble(solver, nullptr, {}, opts, cfg.samples, seed, cfg.dump_samples);
      summary["picard"] = json_picard(res.report);
      std::vector<double> sq(res.terminals.size());
      for (std::size_t s = 0; s < res.terminals.size(); ++s) {
        sq[s] = norm2(res.terminals[s]);
      }
      summary["terminal_second_moment"] = json_estimate(estimate_from(sq, seed));
      summary["sup_norms"] = ordered_json{
          {"f1", res.sup_f1}, {"f2", res.sup_f2}, {"g", res.sup_g}};
      kept = std::move(res.trajectories);
      if (!res.report.converged) {
        summary["error"] = "not_converged";
        failure = res.report;
      }
      break;
    }
    case ExperimentKind::Certificate: {
      const ContractionCertificate cert = contraction_certificate(scn, bc, cfg.delta);
      summary["certificate"] = json_certificate(cert);
      break;
    }
    case ExperimentKind::Sweep: {
      SpectralVector target(scn.n_modes);
      for (std::size_t i = 0; i < cfg.target_coeffs.size(); ++i) {
        target.c[i] = cfg.target_coeffs[i];
      }
      DeltaSweepReport rep = approx_controllability_sweep(
          solver, target, cfg.deltas, cfg.samples, seed, opts, cfg.dump_samples);
      ordered_json sweep;
      sweep["deltas"] = rep.deltas;
      sweep["terminal_errors"] = ordered_json::array();
      for (const auto& est : rep.terminal_errors) {
        sweep["terminal_errors"].push_back(json_estimate(est));
      }
      sweep["picard"] = ordered_json::array();
      for (const auto& p : rep.picard) sweep["picard"].push_back(json_picard(p));
      sweep["solver_converged"] = rep.solver_converged;
      sweep["monotone_decreasing"] = rep.monotone;
      sweep["fitted_rate"] = rep.fitted_rate;
      sweep["gramian_eigenvalues"] = rep.gramian_eigenvalues;
      sweep["uncontrollable_modes"] = rep.uncontrollable_modes;
      sweep["error_floor"] = rep.error_floor;
      sweep["sup_norms"] = ordered_json{
          {"f1", rep.sup_f1}, {"f2", rep.sup_f2}, {"g", rep.sup_g}};
      summary["sweep"] = std::move(sweep);
      try {
        summary["certificate"] =
            json_certificate(contraction_certificate(scn, bc, cfg.deltas.back()));
      } catch (const MissingConstant&) {
        // Constants are optional for sweeps.
      }
      kept = std::move(rep.kept);
      break;
    }
    case ExperimentKind::Audit: {
      const auto checks = hypothesis_audit(scn, seed, cfg.audit_samples);
      ordered_json audit = ordered_json::array();
      bool all_pass = true;
      for (const auto& chk : checks) {
        audit.push_back(ordered_json{{"hypothesis", chk.name},
                                     {"configured", chk.configured},
                                     {"observed", chk.observed},
                                     {"pass", chk.pass}});
        all_pass = all_pass && chk.pass;
      }
      summary["audit"] = std::move(audit);
      summary["audit_pass"] = all_pass;
      break;
    }
  }

  std::filesystem::create_directories(cfg.out_dir);
  ExperimentResult result;
  result.trajectories_csv = std::filesystem::path(cfg.out_dir) / "trajectories.csv";
  result.summary_json = std::filesystem::path(cfg.out_dir) / "summary.json";
  write_csv(result.trajectories_csv, grid, kept, scn.n_modes);

  const auto t_end = std::chrono::steady_clock::now();
  summary["wall_time_seconds"] =
      std::chrono::duration<double>(t_end - t_start).count();
  {
    std::ofstream out(result.summary_json, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + result.summary_json.string());
    out << summary.dump(2) << '\n';
  }
  result.summary = std::move(summary);
  if (failure) throw NotConverged(*failure);
  return result;
}

}  // namespace fsic
