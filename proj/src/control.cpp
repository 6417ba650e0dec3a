#include "fsic/control.hpp"

#include <algorithm>
#include <cmath>

namespace fsic {

std::vector<double> GramianModel::eigenvalues() const {
  std::vector<double> eig;
  if (n_modes >= 1) {
    if (n_modes >= 2) {
      const double tr = b11 + b22;
      const double disc = std::sqrt(std::max((b11 - b22) * (b11 - b22) + 4.0 * b12 * b12, 0.0));
      eig.push_back(0.5 * (tr + disc));
      eig.push_back(0.5 * (tr - disc));
    } else {
      eig.push_back(b11);
    }
  }
  eig.insert(eig.end(), diag.begin(), diag.end());
  return eig;
}

double GramianModel::min_eigenvalue() const {
  double mn = std::numeric_limits<double>::infinity();
  for (double e : eigenvalues()) mn = std::min(mn, e);
  return std::isfinite(mn) ? mn : 0.0;
}

void GramianModel::resolvent_apply_into(double delta, const double* in, double* out) const {
  if (n_modes >= 2) {
    const double a = delta + b11;
    const double d = delta + b22;
    const double det = a * d - b12 * b12;
    out[0] = (d * in[0] - b12 * in[1]) / det;
    out[1] = (-b12 * in[0] + a * in[1]) / det;
  } else if (n_modes == 1) {
    out[0] = in[0] / (delta + b11);
  }
  for (int m = 2; m < n_modes; ++m) {
    out[m] = in[m] / (delta + diag[m - 2]);
  }
}

GramianModel gramian(const FractionalFamilies& fam, double y, double b, int quad_steps) {
  if (!(b > 0.0)) throw ValidationError("b", "must be > 0");
  if (!(y >= 0.0 && y <= b)) throw ValidationError("y", "must lie in [0, b]");
  if (quad_steps < 1) throw ValidationError("quad_steps", "must be >= 1");

  GramianModel mu;
  mu.y = y;
  mu.n_modes = fam.n_modes();
  mu.diag.assign(std::max(0, fam.n_modes() - 2), 0.0);
  if (y >= b) return mu;

  // Left-point rule on a uniform partition of [y, b], matching the discrete
  // control convolution convention.
  const double h = (b - y) / quad_steps;
  for (int k = 0; k < quad_steps; ++k) {
    const double s = y + k * h;
    const double p1 = fam.n_modes() >= 1 ? fam.p(0, b - s) : 0.0;
    const double p2 = fam.n_modes() >= 2 ? fam.p(1, b - s) : 0.0;
    mu.b11 += h * 4.0 * p1 * p1;
    mu.b12 += h * 2.0 * p1 * p2;
    mu.b22 += h * p2 * p2;
    for (int m = 2; m < fam.n_modes(); ++m) {
      const double pm = fam.p(m, b - s);
      mu.diag[m - 2] += h * pm * pm;
    }
  }
  if (fam.n_modes() < 2) {
    // No control channels exist without mode 2; B vanishes.
    mu.b11 = 0.0;
  }
  return mu;
}

SpectralVector resolvent_apply(double delta, const GramianModel& mu,
                               const SpectralVector& v) {
  if (!(delta > 0.0)) throw ValidationError("delta", "must be > 0");
  if (v.size() != mu.n_modes) {
    throw DimensionMismatch("resolvent_apply: vector size " + std::to_string(v.size()) +
                            " != gramian modes " + std::to_string(mu.n_modes));
  }
  SpectralVector out(v.size());
  mu.resolvent_apply_into(delta, v.c.data(), out.c.data());
  return out;
}

double resolvent_norm(double delta, const GramianModel& mu) {
  return 1.0 / (delta + mu.min_eigenvalue());
}

GramianTable::GramianTable(const MildSolver& solver) {
  const TimeGrid& grid = solver.grid();
  const int K = grid.num_nodes();
  const int n = solver.n_modes();
  const int terminal = K - 1;

  table_.assign(K, GramianModel{});
  GramianModel acc;
  acc.n_modes = n;
  acc.diag.assign(std::max(0, n - 2), 0.0);
  for (int k = K - 1; k >= 0; --k) {
    if (k < K - 1) {
      const double dt = grid.dt[k];
      if (dt > 0.0 && n >= 2) {
        const double p1 = solver.kp(terminal, k, 0);
        const double p2 = solver.kp(terminal, k, 1);
        acc.b11 += dt * 4.0 * p1 * p1;
        acc.b12 += dt * 2.0 * p1 * p2;
        acc.b22 += dt * p2 * p2;
        for (int m = 2; m < n; ++m) {
          const double pm = solver.kp(terminal, k, m);
          acc.diag[m - 2] += dt * pm * pm;
        }
      }
    }
    acc.y = grid.time(k);
    table_[k] = acc;
  }
}

void control_udelta(const MildSolver& solver, const GramianTable& gramians,
                    const ControlProblem& prob, const SweepData& data,
                    std::span<const double> increments, ControlPath& u) {
  const TimeGrid& grid = solver.grid();
  const int K = grid.num_nodes();
  const int n = solver.n_modes();
  const int terminal = K - 1;
  const double delta = prob.delta;
  if (!(delta > 0.0)) throw ValidationError("delta", "must be > 0");
  if (prob.target_mean.size() != n) {
    throw DimensionMismatch("target dimension != n_modes");
  }

  // Leading term: R(delta, mu_0^b)(E zeta_b - C_r(b)[phi(0)+h] - S_r(b)[xi+f1(0)]).
  SpectralVector lead(n);
  for (int m = 0; m < n; ++m) {
    lead.c[m] = prob.target_mean.c[m] -
                solver.kc(terminal, 0, m) * (data.phi0.c[m] + data.h_vec.c[m]) -
                solver.ks(terminal, 0, m) *
                    (solver.scenario().xi.c[m] + data.f1_zero.c[m]);
  }
  SpectralVector bracket = resolvent_apply(delta, gramians.full(), lead);

  // Time-varying resolvents inside the y-integrals, left-point weights.
  SpectralVector term(n), solved(n);
  for (int j = 0; j < K - 1; ++j) {
    const double dt = grid.dt[j];
    const GramianModel& mu_j = gramians.at_node(j);
    bool any = false;
    if (dt > 0.0) {
      for (int m = 0; m < n; ++m) {
        const std::size_t idx = static_cast<std::size_t>(j) * n + m;
        term.c[m] = dt * (solver.kc(terminal, j, m) * data.f1[idx] -
                          solver.kp(terminal, j, m) * (data.f2[idx] + data.ig[idx]));
      }
      any = true;
    } else {
      std::fill(term.c.begin(), term.c.end(), 0.0);
    }
    if (!prob.martingale.empty() && j < grid.num_steps()) {
      for (int m = 0; m < n; ++m) {
        term.c[m] += prob.martingale[static_cast<std::size_t>(j) * n + m] *
                     increments[static_cast<std::size_t>(j) * n + m];
      }
      any = true;
    }
    if (!any) continue;
    mu_j.resolvent_apply_into(delta, term.c.data(), solved.c.data());
    bracket += solved;
  }

  // Impulse terms; the unbound resolvent index is taken at y = x_p.
  for (std::size_t p = 0; p < solver.scenario().impulses.size(); ++p) {
    const int post = grid.post_node(static_cast<int>(p));
    const GramianModel& mu_p = gramians.at_node(post);
    for (int m = 0; m < n; ++m) {
      term.c[m] = -(solver.kc(terminal, post, m) * data.jump_state[p].c[m] +
                    solver.ks(terminal, post, m) * data.jump_velocity[p].c[m]);
    }
    mu_p.resolvent_apply_into(delta, term.c.data(), solved.c.data());
    bracket += solved;
  }

  // u(t_i) = B* ( P_r(b - t_i) bracket ).
  u.assign(K, SpectralVector(n));
  SpectralVector pr_bracket(n);
  for (int i = 0; i < K; ++i) {
    for (int m = 0; m < n; ++m) {
      pr_bracket.c[m] = solver.kp(terminal, i, m) * bracket.c[m];
    }
    u[i] = b_star_apply(pr_bracket);
  }
}

EnsembleResult coupled_solve(const MildSolver& solver, const GramianTable& gramians,
                             const ControlProblem& prob, const SolverOptions& opts,
                             int samples, std::uint64_t seed, int keep_count) {
  ControlRefresh refresh = [&](int, const Trajectory&, const SweepData& data,
                               std::span<const double> increments, ControlPath& u) {
    control_udelta(solver, gramians, prob, data, increments, u);
  };
  return solve_ensemble(solver, &refresh, {}, opts, samples, seed, keep_count);
}

DeltaSweepReport approx_controllability_sweep(const MildSolver& solver,
                                              const SpectralVector& target,
                                              const std::vector<double>& deltas,
                                              int samples, std::uint64_t seed,
                                              const SolverOptions& opts, int keep_last) {
  if (deltas.empty()) throw ValidationError("deltas", "must not be empty");
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!(deltas[i] > 0.0)) throw ValidationError("deltas", "must all be > 0");
    if (i > 0 && !(deltas[i] < deltas[i - 1])) {
      throw ValidationError("deltas", "must be strictly decreasing");
    }
  }

  const GramianTable gramians(solver);
  const int n = solver.n_modes();

  DeltaSweepReport report;
  report.deltas = deltas;
  report.gramian_eigenvalues = gramians.full().eigenvalues();

  // Directions with (numerically) zero Gramian eigenvalue cannot be steered;
  // the sweep proceeds but the irreducible target mass is reported.
  const GramianModel& mu0 = gramians.full();
  const double eig_tol = 1e-14;
  if (n >= 2) {
    const auto eig = mu0.eigenvalues();
    if (eig[std::min<std::size_t>(1, eig.size() - 1)] <= eig_tol && n >= 2) {
      // Null direction of the 2x2 block.
      const double tr = mu0.b11 + mu0.b22;
      const double disc =
          std::sqrt(std::max((mu0.b11 - mu0.b22) * (mu0.b11 - mu0.b22) +
                             4.0 * mu0.b12 * mu0.b12, 0.0));
      const double lam_min = 0.5 * (tr - disc);
      double vx = -mu0.b12, vy = mu0.b11 - lam_min;
      const double norm = std::hypot(vx, vy);
      if (norm > 0.0) {
        vx /= norm;
        vy /= norm;
        const double mass = target.c[0] * vx + target.c[1] * vy;
        report.uncontrollable_modes.push_back(1);
        report.uncontrollable_modes.push_back(2);
        report.error_floor += mass * mass;
      }
    }
  } else if (n == 1) {
    report.uncontrollable_modes.push_back(1);
    report.error_floor += target.c[0] * target.c[0];
  }
  for (int m = 2; m < n; ++m) {
    if (mu0.diag[m - 2] <= eig_tol) {
      report.uncontrollable_modes.push_back(m + 1);
      report.error_floor += target.c[m] * target.c[m];
    }
  }

  for (std::size_t d = 0; d < deltas.size(); ++d) {
    const double delta = deltas[d];
    ControlProblem prob;
    prob.target_mean = target;
    prob.delta = delta;
    const int keep = d + 1 == deltas.size() ? keep_last : 0;
    EnsembleResult ens = coupled_solve(solver, gramians, prob, opts, samples, seed, keep);
    if (keep > 0) report.kept = std::move(ens.trajectories);

    std::vector<double> sq(samples);
    for (int s = 0; s < samples; ++s) {
      sq[s] = norm2(ens.terminals[s] - target);
    }
    report.terminal_errors.push_back(estimate_from(sq, seed));
    report.picard.push_back(ens.report);
    report.solver_converged.push_back(ens.report.converged);
    report.sup_f1 = std::max(report.sup_f1, ens.sup_f1);
    report.sup_f2 = std::max(report.sup_f2, ens.sup_f2);
    report.sup_g = std::max(report.sup_g, ens.sup_g);
  }

  report.monotone = true;
  for (std::size_t i = 0; i + 1 < report.terminal_errors.size(); ++i) {
    const auto& a = report.terminal_errors[i];
    const auto& b = report.terminal_errors[i + 1];
    const double margin = 2.0 * std::sqrt(a.std_error * a.std_error +
                                          b.std_error * b.std_error);
    if (!(a.mean - b.mean > margin)) {
      report.monotone = false;
      break;
    }
  }

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    const double mean = report.terminal_errors[i].mean;
    if (mean > 0.0) {
      const double lx = std::log(deltas[i]);
      const double ly = std::log(mean);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
      ++count;
    }
  }
  if (count >= 2) {
    report.fitted_rate = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  }
  return report;
}

}  // namespace fsic
