#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "fsic/inclusion.hpp"
#include "fsic/scenario.hpp"
#include "fsic/spectral_model.hpp"
#include "fsic/stochastic.hpp"

namespace fsic {

struct PicardReport {
  int iterations = 0;
  double final_gap = 0.0;  // sup-over-grid mean-square gap of the last sweep
  bool converged = false;
  double empirical_rate = 0.0;  // geometric ratio of successive gaps
};

struct NotConverged : std::runtime_error {
  explicit NotConverged(PicardReport r)
      : std::runtime_error("picard iteration did not reach tolerance after " +
                           std::to_string(r.iterations) + " sweeps (gap " +
                           std::to_string(r.final_gap) + ")"),
        report(r) {}
  PicardReport report;
};

struct ContractionCertificate {
  double Lambda = 0.0;
  double delta = 0.0;
  double lhs = 0.0;  // Lambda (1 + (6/delta) M3^2 M4^2 b)
  bool satisfied = false;
};

// Lambda = 14 [ M1 L_h + 2 L_f1 (M2 + M1 b) + 2 M3 b L_f2
//               + C2 int_0^b M3 ell w_hat + sum M1 L_I + sum M2 L_J ]
// with C2 = 1 (Ito isometry at p = 2) and constant w_hat. Throws
// MissingConstant when a required constant is unset.
ContractionCertificate contraction_certificate(const ScenarioSpec& scn,
                                               const BoundConstants& bc, double delta);

struct SolverOptions {
  double tol = 1e-9;       // per-sample sup-node mean-square gap
  int max_iter = 80;
  SelectionStrategy selection;
  double relaxation = 0.0;  // 0 = adaptive damping; else fixed blend in (0, 1]
  int workers = 0;          // 0 = default_worker_count()
};

// Control input sampled on the grid nodes; empty means zero control.
using ControlPath = std::vector<SpectralVector>;

// All iterate-dependent node data of one Picard sweep.
struct SweepData {
  SpectralVector h_vec;
  SpectralVector phi0;
  SpectralVector f1_zero;    // f1(0, zeta(0), zeta(nu1(0)))
  std::vector<double> f1;    // [node * n_modes + mode]
  std::vector<double> f2;
  std::vector<double> g;     // selection path
  std::vector<double> ig;    // inner convolution int_0^y varrho(y-tau) g dw
  std::vector<SpectralVector> jump_state;     // per impulse
  std::vector<SpectralVector> jump_velocity;
};

// Discrete realization of the mild-solution operator on a fixed grid. Kernel
// values are tabulated for every node pair, so one sweep is a pair of
// convolutions. Immutable and shareable across sample workers.
class MildSolver {
 public:
  MildSolver(const ScenarioSpec& scn, const TimeGrid& grid,
             std::shared_ptr<const FractionalFamilies> fam);

  const ScenarioSpec& scenario() const { return scn_; }
  const TimeGrid& grid() const { return grid_; }
  const FractionalFamilies& families() const { return *fam_; }
  int n_modes() const { return scn_.n_modes; }

  // Kernel values at time differences t_i - t_j, j <= i.
  double kc(int i, int j, int mode) const { return ker_c_[pair_base(i, j) + mode]; }
  double ks(int i, int j, int mode) const { return ker_s_[pair_base(i, j) + mode]; }
  double kp(int i, int j, int mode) const { return ker_p_[pair_base(i, j) + mode]; }

  Trajectory initial_iterate() const;  // C_r(x) phi(0), history phi

  // Refreshes the iterate's history to phi + h(current) and fills the sweep
  // data (selection, nonlinearities, inner stochastic convolution, jumps).
  void build_sweep_data(Trajectory& current, const SelectionStrategy& strat,
                        std::uint64_t sample_index, std::span<const double> increments,
                        SweepData& data) const;

  // next <- right-hand side of the mild-solution formula for the given sweep
  // data and control path.
  void apply_rhs(const SweepData& data, const ControlPath& u, Trajectory& next) const;

  // One-call form of the operator (spec surface; the solve loop uses the two
  // halves above).
  Trajectory rhs_eval(Trajectory current, const ControlPath& u,
                      const SelectionStrategy& strat, std::uint64_t sample_index,
                      std::span<const double> increments) const;

  double nu1_at(int node) const { return nu1_at_[node]; }
  const std::vector<double>& nu3_at_nodes() const { return nu3_at_; }

 private:
  ScenarioSpec scn_;
  TimeGrid grid_;
  std::shared_ptr<const FractionalFamilies> fam_;
  std::vector<double> ker_c_, ker_s_, ker_p_;  // [tri(i) + j] * n + mode
  std::vector<double> rho_pair_;               // varrho(t_i - t_j)
  std::vector<double> nu1_at_, nu2_at_, nu3_at_;
  std::vector<int> post_nodes_;  // per impulse

  std::size_t pair_base(int i, int j) const {
    return (static_cast<std::size_t>(i) * (i + 1) / 2 + j) * scn_.n_modes;
  }
  std::size_t pair_index(int i, int j) const {
    return static_cast<std::size_t>(i) * (i + 1) / 2 + j;
  }

  friend class GramianTable;
};

// Per-sweep control refresh; fills u for the current iterate (coupled solves).
using ControlRefresh = std::function<void(int sample_index, const Trajectory& current,
                                          const SweepData& data,
                                          std::span<const double> increments,
                                          ControlPath& u)>;

struct EnsembleResult {
  std::vector<SpectralVector> terminals;   // zeta(b) per sample
  std::vector<Trajectory> trajectories;    // first keep_count samples
  PicardReport report;
  double sup_f1 = 0.0, sup_f2 = 0.0, sup_g = 0.0;  // sampled sup norms
};

// Pathwise Picard iteration per sample: the noise path is drawn once from
// (seed, sample) and reused across sweeps; the selection and h are recomputed
// from the current iterate each sweep. Adaptive damping halves the blend
// whenever the gap grows; the fixed point is unchanged. Samples run on
// independent workers and land in index-ordered slots.
EnsembleResult solve_ensemble(const MildSolver& solver, const ControlRefresh* refresh,
                              const ControlPath& fixed_u, const SolverOptions& opts,
                              int samples, std::uint64_t seed, int keep_count);

// Fixed-control solve (throws NotConverged when any sample fails to settle).
EnsembleResult picard_solve(const MildSolver& solver, const ControlPath& u,
                            const SolverOptions& opts, int samples, std::uint64_t seed,
                            int keep_count = 0);

}  // namespace fsic
