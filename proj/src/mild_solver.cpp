#include "fsic/mild_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "fsic/parallel.hpp"

namespace fsic {

int default_worker_count() {
  if (const char* env = std::getenv("FSIC_WORKERS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

ContractionCertificate contraction_certificate(const ScenarioSpec& scn,
                                               const BoundConstants& bc, double delta) {
  if (!(delta > 0.0)) throw ValidationError("delta", "must be > 0");
  const HypothesisConstants& k = scn.constants;
  auto require = [](double v, const char* name) {
    if (std::isnan(v)) throw MissingConstant(std::string(name) + " is not configured");
    return v;
  };
  const double b = scn.horizon;
  double impulse_sum = 0.0;
  for (std::size_t p = 0; p < scn.impulses.size(); ++p) {
    if (p >= k.L_I.size() || p >= k.L_J.size()) {
      throw MissingConstant("L_I / L_J required for every impulse");
    }
    impulse_sum += bc.M1 * require(k.L_I[p], "L_I") + bc.M2 * require(k.L_J[p], "L_J");
  }
  const double c2 = 1.0;  // Ito isometry constant at p = 2
  const double lambda =
      14.0 * (bc.M1 * require(k.L_h, "L_h") +
              2.0 * require(k.L_f1, "L_f1") * (bc.M2 + bc.M1 * b) +
              2.0 * bc.M3 * b * require(k.L_f2, "L_f2") +
              c2 * bc.M3 * require(k.growth.ell, "ell") *
                  require(k.growth.w_hat, "w_hat") * b +
              impulse_sum);
  ContractionCertificate cert;
  cert.Lambda = lambda;
  cert.delta = delta;
  cert.lhs = lambda * (1.0 + 6.0 / delta * bc.M3 * bc.M3 * bc.M4 * bc.M4 * b);
  cert.satisfied = cert.lhs < 1.0;
  return cert;
}

MildSolver::MildSolver(const ScenarioSpec& scn, const TimeGrid& grid,
                       std::shared_ptr<const FractionalFamilies> fam)
    : scn_(scn), grid_(grid), fam_(std::move(fam)) {
  scn_.validate();
  if (fam_->n_modes() != scn_.n_modes) {
    throw DimensionMismatch("families built for " + std::to_string(fam_->n_modes()) +
                            " modes, scenario has " + std::to_string(scn_.n_modes));
  }
  if (std::fabs(fam_->r() - scn_.r()) > 1e-12) {
    throw GridMismatch("families built for a different fractional order");
  }

  const int K = grid_.num_nodes();
  const int n = scn_.n_modes;
  const std::size_t pairs = static_cast<std::size_t>(K) * (K + 1) / 2;
  ker_c_.resize(pairs * n);
  ker_s_.resize(pairs * n);
  ker_p_.resize(pairs * n);
  rho_pair_.assign(pairs, 0.0);
  for (int i = 0; i < K; ++i) {
    for (int j = 0; j <= i; ++j) {
      const double t = std::max(grid_.time(i) - grid_.time(j), 0.0);
      double* c_row = ker_c_.data() + pair_base(i, j);
      double* s_row = ker_s_.data() + pair_base(i, j);
      double* p_row = ker_p_.data() + pair_base(i, j);
      for (int m = 0; m < n; ++m) {
        c_row[m] = fam_->c(m, t);
        s_row[m] = fam_->s(m, t);
        p_row[m] = fam_->p(m, t);
      }
      if (scn_.varrho) rho_pair_[pair_index(i, j)] = scn_.varrho(t);
    }
  }

  nu1_at_.resize(K);
  nu2_at_.resize(K);
  nu3_at_.resize(K);
  auto fill_delay = [&](const DelayMap& nu, std::vector<double>& out, const char* name) {
    for (int k = 0; k < K; ++k) {
      const double x = grid_.time(k);
      const double v = nu ? nu(x) : x;
      if (v > x + 1e-12 || v < -scn_.history - 1e-12) {
        throw ValidationError(name, "delay must map into [-a, x]");
      }
      out[k] = std::min(v, x);
    }
  };
  fill_delay(scn_.nu1, nu1_at_, "nu1");
  fill_delay(scn_.nu2, nu2_at_, "nu2");
  fill_delay(scn_.nu3, nu3_at_, "nu3");

  post_nodes_.resize(scn_.impulses.size());
  for (std::size_t p = 0; p < scn_.impulses.size(); ++p) {
    post_nodes_[p] = grid_.post_node(static_cast<int>(p));
  }
}

Trajectory MildSolver::initial_iterate() const {
  const int K = grid_.num_nodes();
  const int n = scn_.n_modes;
  Trajectory traj;
  traj.states.assign(K, SpectralVector(n));

  const double delta = grid_.uniform_delta();
  int hist_steps = scn_.history > 0.0
                       ? std::max(1, static_cast<int>(std::round(scn_.history / delta)))
                       : 0;
  traj.hist_times.resize(hist_steps + 1);
  traj.hist_states.assign(hist_steps + 1, SpectralVector(n));
  for (int k = 0; k <= hist_steps; ++k) {
    const double t = hist_steps == 0
                         ? 0.0
                         : -scn_.history + scn_.history * k / hist_steps;
    traj.hist_times[k] = t;
    if (scn_.phi) traj.hist_states[k] = scn_.phi(t);
  }
  traj.hist_times.back() = 0.0;

  SpectralVector phi0(n);
  if (scn_.phi) phi0 = scn_.phi(0.0);
  for (int i = 0; i < K; ++i) {
    for (int m = 0; m < n; ++m) {
      traj.states[i].c[m] = kc(i, 0, m) * phi0.c[m];
    }
  }
  return traj;
}

void MildSolver::build_sweep_data(Trajectory& current, const SelectionStrategy& strat,
                                  std::uint64_t sample_index,
                                  std::span<const double> increments,
                                  SweepData& data) const {
  const int K = grid_.num_nodes();
  const int n = scn_.n_modes;

  data.h_vec = scn_.h.taus.empty() ? SpectralVector(n)
                                   : scn_.h.eval(grid_, current, n);
  data.phi0 = scn_.phi ? scn_.phi(0.0) : SpectralVector(n);

  // zeta(x) = phi(x) + h(zeta) on [-a, 0], refreshed from the current iterate.
  for (std::size_t k = 0; k < current.hist_times.size(); ++k) {
    SpectralVector v = scn_.phi ? scn_.phi(current.hist_times[k]) : SpectralVector(n);
    v += data.h_vec;
    current.hist_states[k] = std::move(v);
  }

  data.f1.assign(static_cast<std::size_t>(K) * n, 0.0);
  data.f2.assign(static_cast<std::size_t>(K) * n, 0.0);
  data.g.assign(static_cast<std::size_t>(K) * n, 0.0);
  data.ig.assign(static_cast<std::size_t>(K) * n, 0.0);

  SpectralVector delayed(n), out(n);
  auto delayed_value = [&](double t, SpectralVector& dst) {
    dst = current.at_time(grid_, t);
  };

  delayed_value(nu1_at_[0], delayed);
  data.f1_zero = SpectralVector(n);
  if (scn_.f1) scn_.f1(0.0, current.states[0], delayed, data.f1_zero);

  for (int j = 0; j < K; ++j) {
    const double x = grid_.time(j);
    if (scn_.f1) {
      delayed_value(nu1_at_[j], delayed);
      scn_.f1(x, current.states[j], delayed, out);
      std::copy(out.c.begin(), out.c.end(), data.f1.begin() + static_cast<std::size_t>(j) * n);
    }
    if (scn_.f2) {
      delayed_value(nu2_at_[j], delayed);
      scn_.f2(x, current.states[j], delayed, out);
      std::copy(out.c.begin(), out.c.end(), data.f2.begin() + static_cast<std::size_t>(j) * n);
    }
    if (scn_.inclusion.bounds) {
      delayed_value(nu3_at_[j], delayed);
      const SpectralVector sel =
          select(scn_.inclusion, strat, x, current.states[j], delayed, sample_index, j);
      std::copy(sel.c.begin(), sel.c.end(), data.g.begin() + static_cast<std::size_t>(j) * n);
    }
  }

  // Inner stochastic convolution: ig(t_i) = sum_{k<i} varrho(t_i - t_k) g_k dW_k.
  if (scn_.inclusion.bounds && !increments.empty()) {
    std::vector<double> gw(static_cast<std::size_t>(grid_.num_steps()) * n);
    for (int k = 0; k < grid_.num_steps(); ++k) {
      for (int m = 0; m < n; ++m) {
        gw[static_cast<std::size_t>(k) * n + m] =
            data.g[static_cast<std::size_t>(k) * n + m] *
            increments[static_cast<std::size_t>(k) * n + m];
      }
    }
    for (int i = 1; i < K; ++i) {
      double* row = data.ig.data() + static_cast<std::size_t>(i) * n;
      for (int k = 0; k < i && k < grid_.num_steps(); ++k) {
        const double rho = rho_pair_[pair_index(i, k)];
        if (rho == 0.0) continue;
        const double* gw_row = gw.data() + static_cast<std::size_t>(k) * n;
        for (int m = 0; m < n; ++m) row[m] += rho * gw_row[m];
      }
    }
  }

  data.jump_state.assign(scn_.impulses.size(), SpectralVector(n));
  data.jump_velocity.assign(scn_.impulses.size(), SpectralVector(n));
  for (std::size_t p = 0; p < scn_.impulses.size(); ++p) {
    const int pre = post_nodes_[p] - 1;
    if (scn_.impulses[p].state_jump) {
      data.jump_state[p] = scn_.impulses[p].state_jump(grid_, current, pre);
    }
    if (scn_.impulses[p].velocity_jump) {
      data.jump_velocity[p] = scn_.impulses[p].velocity_jump(grid_, current, pre);
    }
  }
}

void MildSolver::apply_rhs(const SweepData& data, const ControlPath& u,
                           Trajectory& next) const {
  const int K = grid_.num_nodes();
  const int n = scn_.n_modes;
  if (!u.empty() && static_cast<int>(u.size()) != K) {
    throw GridMismatch("control path has " + std::to_string(u.size()) + " nodes, grid has " +
                       std::to_string(K));
  }

  next.states.assign(K, SpectralVector(n));

  SpectralVector base_c = data.phi0;
  base_c += data.h_vec;
  SpectralVector base_s = scn_.xi;
  base_s += data.f1_zero;

  // Combined P_r integrand: f2 + B u + inner stochastic convolution.
  std::vector<double> w2(static_cast<std::size_t>(K) * n);
  SpectralVector bu(n);
  for (int j = 0; j < K; ++j) {
    double* row = w2.data() + static_cast<std::size_t>(j) * n;
    const double* f2_row = data.f2.data() + static_cast<std::size_t>(j) * n;
    const double* ig_row = data.ig.data() + static_cast<std::size_t>(j) * n;
    if (!u.empty()) {
      bu = b_apply(u[j]);
      for (int m = 0; m < n; ++m) row[m] = f2_row[m] + ig_row[m] + bu.c[m];
    } else {
      for (int m = 0; m < n; ++m) row[m] = f2_row[m] + ig_row[m];
    }
  }

  for (int i = 0; i < K; ++i) {
    double* acc = next.states[i].c.data();
    const double* c0 = ker_c_.data() + pair_base(i, 0);
    const double* s0 = ker_s_.data() + pair_base(i, 0);
    for (int m = 0; m < n; ++m) {
      acc[m] = c0[m] * base_c.c[m] + s0[m] * base_s.c[m];
    }
    for (int j = 0; j < i; ++j) {
      const double dt = grid_.dt[j];
      if (dt == 0.0) continue;
      const double* c_row = ker_c_.data() + pair_base(i, j);
      const double* p_row = ker_p_.data() + pair_base(i, j);
      const double* f1_row = data.f1.data() + static_cast<std::size_t>(j) * n;
      const double* w2_row = w2.data() + static_cast<std::size_t>(j) * n;
      for (int m = 0; m < n; ++m) {
        acc[m] += dt * (p_row[m] * w2_row[m] - c_row[m] * f1_row[m]);
      }
    }
    for (std::size_t p = 0; p < post_nodes_.size(); ++p) {
      if (post_nodes_[p] > i) break;
      const double* c_row = ker_c_.data() + pair_base(i, post_nodes_[p]);
      const double* s_row = ker_s_.data() + pair_base(i, post_nodes_[p]);
      for (int m = 0; m < n; ++m) {
        acc[m] += c_row[m] * data.jump_state[p].c[m] + s_row[m] * data.jump_velocity[p].c[m];
      }
    }
  }

}

Trajectory MildSolver::rhs_eval(Trajectory current, const ControlPath& u,
                                const SelectionStrategy& strat, std::uint64_t sample_index,
                                std::span<const double> increments) const {
  SweepData data;
  build_sweep_data(current, strat, sample_index, increments, data);
  Trajectory next;
  next.hist_times = current.hist_times;
  next.hist_states = current.hist_states;
  apply_rhs(data, u, next);
  return next;
}

namespace {

double sup_gap(const Trajectory& a, const Trajectory& b) {
  double gap = 0.0;
  for (std::size_t i = 0; i < a.states.size(); ++i) {
    gap = std::max(gap, norm2(a.states[i] - b.states[i]));
  }
  return gap;
}

double path_sup_norm(const std::vector<double>& values, int n) {
  double sup = 0.0;
  const std::size_t nodes = values.size() / n;
  for (std::size_t j = 0; j < nodes; ++j) {
    double acc = 0.0;
    for (int m = 0; m < n; ++m) {
      const double v = values[j * n + m];
      acc += v * v;
    }
    sup = std::max(sup, acc);
  }
  return std::sqrt(sup);
}

}  // namespace

EnsembleResult solve_ensemble(const MildSolver& solver, const ControlRefresh* refresh,
                              const ControlPath& fixed_u, const SolverOptions& opts,
                              int samples, std::uint64_t seed, int keep_count) {
  if (samples < 1) throw ValidationError("samples", "must be >= 1");
  const TimeGrid& grid = solver.grid();
  const int n = solver.n_modes();
  keep_count = std::min(keep_count, samples);

  EnsembleResult result;
  result.terminals.assign(samples, SpectralVector(n));
  result.trajectories.resize(keep_count);

  std::vector<PicardReport> reports(samples);
  std::vector<double> sup1(samples, 0.0), sup2(samples, 0.0), supg(samples, 0.0);

  const int workers = opts.workers > 0 ? opts.workers : default_worker_count();
  parallel_for(samples, workers, [&](int s) {
    const std::vector<double> increments =
        wiener_increments(solver.scenario().noise, grid, seed, static_cast<std::uint64_t>(s));
    Trajectory current = solver.initial_iterate();
    Trajectory next = current;
    SweepData data;
    ControlPath u = fixed_u;

    double omega = opts.relaxation > 0.0 ? opts.relaxation : 1.0;
    const bool adaptive = opts.relaxation <= 0.0;
    std::vector<double> gaps;
    gaps.reserve(opts.max_iter);
    PicardReport rep;
    for (int iter = 1; iter <= opts.max_iter; ++iter) {
      solver.build_sweep_data(current, opts.selection, static_cast<std::uint64_t>(s),
                              increments, data);
      if (refresh) (*refresh)(s, current, data, increments, u);
      next.hist_times = current.hist_times;
      next.hist_states = current.hist_states;
      solver.apply_rhs(data, u, next);
      const double gap = sup_gap(next, current);
      rep.iterations = iter;
      rep.final_gap = gap;
      if (adaptive && !gaps.empty() && gap > gaps.back()) {
        omega = std::max(omega * 0.5, 1.0 / 1024.0);
      }
      gaps.push_back(gap);
      if (omega >= 1.0) {
        std::swap(current.states, next.states);
      } else {
        for (std::size_t i = 0; i < current.states.size(); ++i) {
          for (int m = 0; m < n; ++m) {
            current.states[i].c[m] =
                (1.0 - omega) * current.states[i].c[m] + omega * next.states[i].c[m];
          }
        }
      }
      if (gap <= opts.tol) {
        rep.converged = true;
        break;
      }
    }
    // Geometric rate from successive gap ratios above the tolerance floor.
    double log_sum = 0.0;
    int log_count = 0;
    for (std::size_t k = 0; k + 1 < gaps.size(); ++k) {
      if (gaps[k] > opts.tol && gaps[k + 1] > 0.0) {
        log_sum += std::log(gaps[k + 1] / gaps[k]);
        ++log_count;
      }
    }
    rep.empirical_rate = log_count > 0 ? std::exp(log_sum / log_count) : 0.0;
    reports[s] = rep;
    result.terminals[s] = current.states.back();
    sup1[s] = path_sup_norm(data.f1, n);
    sup2[s] = path_sup_norm(data.f2, n);
    supg[s] = path_sup_norm(data.g, n);
    if (s < keep_count) result.trajectories[s] = current;
  });

  PicardReport agg;
  agg.converged = true;
  for (int s = 0; s < samples; ++s) {
    agg.iterations = std::max(agg.iterations, reports[s].iterations);
    agg.final_gap = std::max(agg.final_gap, reports[s].final_gap);
    agg.converged = agg.converged && reports[s].converged;
    agg.empirical_rate = std::max(agg.empirical_rate, reports[s].empirical_rate);
  }
  result.report = agg;
  for (int s = 0; s < samples; ++s) {
    result.sup_f1 = std::max(result.sup_f1, sup1[s]);
    result.sup_f2 = std::max(result.sup_f2, sup2[s]);
    result.sup_g = std::max(result.sup_g, supg[s]);
  }
  return result;
}

EnsembleResult picard_solve(const MildSolver& solver, const ControlPath& u,
                            const SolverOptions& opts, int samples, std::uint64_t seed,
                            int keep_count) {
  EnsembleResult result = solve_ensemble(solver, nullptr, u, opts, samples, seed, keep_count);
  if (!result.report.converged) throw NotConverged(result.report);
  return result;
}

}  // namespace fsic
