#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "fsic/errors.hpp"
#include "fsic/spectral_model.hpp"

namespace fsic {

// Covariance spectrum of the Q-Wiener process on the model basis.
struct QWienerSpec {
  std::vector<double> variances;  // q_n >= 0

  double trace() const;
  void validate() const;
};

// Piecewise-uniform grid on [0, b] with every impulse point inserted twice
// (left and right limit). dt[k] = t[k+1] - t[k]; the pre->post step across an
// impulse has dt = 0.
struct TimeGrid {
  enum class NodeKind : std::uint8_t { Regular, PreImpulse, PostImpulse };

  struct Node {
    double t;
    NodeKind kind;
    int impulse;  // index into impulse_points, -1 for regular nodes
  };

  double horizon = 0.0;
  int steps = 0;
  std::vector<double> impulse_points;
  std::vector<Node> nodes;
  std::vector<double> dt;

  static TimeGrid make(double b, int steps, std::vector<double> impulse_points = {});

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_steps() const { return static_cast<int>(dt.size()); }
  double time(int k) const { return nodes[k].t; }
  int terminal() const { return num_nodes() - 1; }
  double uniform_delta() const { return horizon / steps; }
  // Post-impulse node index for impulse p.
  int post_node(int p) const;
};

// Sample path on a grid together with the history segment on [-a, 0].
struct Trajectory {
  std::vector<SpectralVector> states;       // one per grid node
  std::vector<double> hist_times;           // ascending, hist_times.back() == 0
  std::vector<SpectralVector> hist_states;  // phi + h segment

  int n_modes() const { return states.empty() ? 0 : states.front().size(); }

  // Value at any time in [-a, b]; linear interpolation between nodes, left
  // value at duplicated impulse nodes.
  SpectralVector at_time(const TimeGrid& grid, double t) const;
};

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  int samples = 0;
  std::uint64_t seed = 0;
};

MonteCarloEstimate estimate_from(std::span<const double> values, std::uint64_t seed);

// Deterministic per-trajectory normal stream: mt19937_64 keyed by
// (seed, index) through a splitmix64 mix, Box-Muller on top. The standard
// library distributions are implementation-defined, so the normal transform
// is spelled out here to keep paths bit-reproducible.
class PathRng {
 public:
  PathRng(std::uint64_t seed, std::uint64_t index);

  double uniform();  // (0, 1]
  double normal();

  static std::uint64_t mix(std::uint64_t seed, std::uint64_t index);

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Per-step increments, flattened as [step * n_modes + mode]; step k covers
// (t_k, t_{k+1}]. Mode n is Normal(0, q_n dt_k), independent across modes and
// steps. Identical (seed, index) gives identical bits.
std::vector<double> wiener_increments(const QWienerSpec& spec, const TimeGrid& grid,
                                      std::uint64_t seed, std::uint64_t index = 0);

// Read-only view of the increments available strictly before a node; asking
// at or beyond the node throws AdaptednessViolation.
class IncrementView {
 public:
  IncrementView(std::span<const double> increments, int n_modes, int limit_step)
      : increments_(increments), n_modes_(n_modes), limit_(limit_step) {}

  double at(int step, int mode) const {
    if (step >= limit_) {
      throw AdaptednessViolation("integrand requested increment at step " +
                                 std::to_string(step) + " >= node limit " +
                                 std::to_string(limit_));
    }
    return increments_[static_cast<std::size_t>(step) * n_modes_ + mode];
  }

 private:
  std::span<const double> increments_;
  int n_modes_;
  int limit_;
};

// Adapted integrand: per-mode operator value at node k, given what the path
// has revealed so far.
using AdaptedIntegrand =
    std::function<void(int node, const IncrementView& past, std::span<double> out)>;

// Left-point Ito sum: result_n = sum_k chi_n(t_k) dW_n(k).
SpectralVector ito_integral(const AdaptedIntegrand& integrand, const TimeGrid& grid,
                            std::span<const double> increments, int n_modes);

// Lemma-style second-moment check at p = 2 with the sharp constant C_2 = 1:
// Monte Carlo estimate of E|int chi dw|^2 against the exact L_2^0 integral.
struct MomentBoundReport {
  double lhs = 0.0;       // estimated E|int chi dw|^2
  double lhs_se = 0.0;    // standard error of the estimate
  double rhs = 0.0;       // int |chi|^2_{L_2^0} ds
  bool pass = false;      // lhs <= rhs (1 + 3 relative se)
};

// chi: deterministic per-node per-mode values, chi[node * n_modes + mode].
MomentBoundReport moment_bound_check(std::span<const double> chi, const TimeGrid& grid,
                                     const QWienerSpec& spec, int samples,
                                     std::uint64_t seed);

}  // namespace fsic
