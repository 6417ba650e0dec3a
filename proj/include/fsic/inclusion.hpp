#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fsic/errors.hpp"
#include "fsic/spectral_model.hpp"
#include "fsic/stochastic.hpp"

namespace fsic {

struct ScenarioSpec;

struct Interval {
  double lo;
  double hi;
};

// Hausdorff distance between closed intervals: max(|lo1-lo2|, |hi1-hi2|).
double hausdorff_interval(const Interval& a, const Interval& b);

// Interval-valued diffusion coefficient, one closed interval per mode:
// bounds(x, zeta_now, zeta_delayed, lower_out, upper_out).
struct IntervalMap {
  std::function<void(double, const SpectralVector&, const SpectralVector&,
                     std::vector<double>&, std::vector<double>&)>
      bounds;

  void eval(double x, const SpectralVector& now, const SpectralVector& delayed,
            std::vector<double>& lo, std::vector<double>& hi) const;
};

enum class SelectionKind : std::uint8_t { Lower, Upper, Midpoint, Random };

struct SelectionStrategy {
  SelectionKind kind = SelectionKind::Midpoint;
  std::uint64_t seed = 0;  // only used by Random
};

SelectionKind selection_kind_from_string(const std::string& name);
std::string to_string(SelectionKind kind);

// Measurable selection g with g_n in [lower_n, upper_n]. The random strategy
// draws a stateless unit variate per (seed, sample, node, mode), so the same
// point always selects the same value within a Picard sweep sequence.
// Throws EmptyInterval when lower > upper at the arguments.
SpectralVector select(const IntervalMap& map, const SelectionStrategy& strat, double x,
                      const SpectralVector& now, const SpectralVector& delayed,
                      std::uint64_t sample_index, int node_index);

// Growth and Lipschitz data for the hypothesis checks. The x-dependent
// weights are taken constant; the increasing functions are affine
// s -> c0 + c1 s with c0 > 0, c1 >= 0.
struct GrowthData {
  double wp = 0.0;       // inclusion growth weight
  double w_hat = 0.0;    // inclusion Lipschitz weight
  double theta = 0.0;    // f2 growth weight
  double ell = 0.0;      // sup |varrho|^2
  double beta0 = 1.0, beta1 = 0.0;      // inclusion growth majorant
  double pounds0 = 1.0, pounds1 = 0.0;  // f2 growth majorant
};

struct SelectionGapReport {
  double worst_ratio = 0.0;  // sup_x int_0^x |g1-g2|^2 / |z1-z2|^2_sup
  double budget = 0.0;       // int_0^b w_hat
  bool within = false;
};

// Validates the configured w_hat against two trajectories: selects g from
// each with the same strategy and compares the cumulative squared gap with
// the sup-square distance of the trajectories.
SelectionGapReport lipschitz_selection_gap(const IntervalMap& map,
                                           const SelectionStrategy& strat,
                                           const TimeGrid& grid, const Trajectory& z1,
                                           const Trajectory& z2, double w_hat,
                                           const std::vector<double>& nu3_at_nodes);

struct HypothesisCheck {
  std::string name;
  double configured = 0.0;
  double observed = 0.0;
  bool pass = false;
};

// Samples random states and verifies each configured (A2)-(A8), (A11)
// inequality numerically; reports the worst observed ratio per hypothesis.
std::vector<HypothesisCheck> hypothesis_audit(const ScenarioSpec& scenario,
                                              std::uint64_t seed, int samples);

}  // namespace fsic
