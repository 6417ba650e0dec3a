#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "fsic/mild_solver.hpp"
#include "fsic/spectral_model.hpp"

namespace fsic {

// Controllability operator mu_y^b = int_y^b P_r(b-s) B B* P_r*(b-s) ds on the
// model basis: a 2x2 block on modes {1,2} (B B* = [[4,2],[2,1]] there) and a
// diagonal for modes >= 3. Symmetric positive semidefinite.
struct GramianModel {
  double y = 0.0;
  int n_modes = 0;
  double b11 = 0.0, b12 = 0.0, b22 = 0.0;
  std::vector<double> diag;  // modes 3.., i.e. coefficient indices 2..

  std::vector<double> eigenvalues() const;  // block eigenvalues then diag
  double min_eigenvalue() const;
  // Solves (delta I + mu) out = in exactly (2x2 block + scalars).
  void resolvent_apply_into(double delta, const double* in, double* out) const;
};

GramianModel gramian(const FractionalFamilies& fam, double y, double b, int quad_steps);

SpectralVector resolvent_apply(double delta, const GramianModel& mu,
                               const SpectralVector& v);
// Operator norm of (delta I + mu)^{-1}; equals 1/(delta + lambda_min) <= 1/delta.
double resolvent_norm(double delta, const GramianModel& mu);

// Suffix Gramians at every grid node with the same left-point weights as the
// discrete control convolution, so the resolvent algebra is exact at the
// discrete level.
class GramianTable {
 public:
  GramianTable(const MildSolver& solver);

  const GramianModel& at_node(int k) const { return table_[k]; }
  const GramianModel& full() const { return table_.front(); }
  int num_nodes() const { return static_cast<int>(table_.size()); }

 private:
  std::vector<GramianModel> table_;
};

// Target data: zeta_b = target_mean + int_0^b martingale dw. The martingale
// integrand is a per-node per-mode path ([node * n_modes + mode]); empty
// means a deterministic target.
struct ControlProblem {
  SpectralVector target_mean;
  std::vector<double> martingale;
  double delta = 1.0;
};

// Resolvent control u_delta evaluated for the current iterate: one pass over
// the sweep data builds the bracket vector (time-varying resolvents inside
// the y-integrals, impulse terms at y = x_p), then
// u(t) = B* P_r(b-t) bracket.
void control_udelta(const MildSolver& solver, const GramianTable& gramians,
                    const ControlProblem& prob, const SweepData& data,
                    std::span<const double> increments, ControlPath& u);

// Coupled fixed point: each sweep recomputes the selection, h, and u_delta
// from the current iterate.
EnsembleResult coupled_solve(const MildSolver& solver, const GramianTable& gramians,
                             const ControlProblem& prob, const SolverOptions& opts,
                             int samples, std::uint64_t seed, int keep_count = 0);

struct DeltaSweepReport {
  std::vector<double> deltas;
  std::vector<MonteCarloEstimate> terminal_errors;  // E|zeta^delta(b) - zeta_b|^2
  std::vector<PicardReport> picard;
  std::vector<bool> solver_converged;
  bool monotone = false;      // strictly decreasing beyond 2 combined sigma
  double fitted_rate = 0.0;   // log-log slope of error vs delta
  std::vector<double> gramian_eigenvalues;
  std::vector<int> uncontrollable_modes;  // 1-based mode indices with mu ~ 0
  double error_floor = 0.0;               // target mass on those directions
  double sup_f1 = 0.0, sup_f2 = 0.0, sup_g = 0.0;
  std::vector<Trajectory> kept;  // controlled trajectories at the final delta
};

DeltaSweepReport approx_controllability_sweep(const MildSolver& solver,
                                              const SpectralVector& target,
                                              const std::vector<double>& deltas,
                                              int samples, std::uint64_t seed,
                                              const SolverOptions& opts,
                                              int keep_last = 0);

}  // namespace fsic
