#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "fsic/inclusion.hpp"
#include "fsic/spectral_model.hpp"
#include "fsic/stochastic.hpp"

namespace fsic {

// (x, zeta(x), zeta(nu(x))) -> vector, written into out.
using StateMap = std::function<void(double, const SpectralVector&, const SpectralVector&,
                                    SpectralVector&)>;

// Delay map nu: [0,b] -> [-a, x].
using DelayMap = std::function<double(double)>;

// Jump functional: sees the full current iterate (history + path) and the
// pre-impulse node, returns the jump vector. Covers both pointwise maps of
// zeta(x_p) and the integral kernels of the spatial example.
using JumpFunctional =
    std::function<SpectralVector(const TimeGrid&, const Trajectory&, int pre_node)>;

struct ImpulseSpec {
  double point = 0.0;
  JumpFunctional state_jump;     // I_p
  JumpFunctional velocity_jump;  // J_p
};

// Nonlocal perturbation h(zeta) = sum_i coeffs[i] * zeta(taus[i]).
struct NonlocalTerm {
  std::vector<double> taus;
  std::vector<double> coeffs;

  SpectralVector eval(const TimeGrid& grid, const Trajectory& traj, int n_modes) const;
};

struct HypothesisConstants {
  static constexpr double unset = std::numeric_limits<double>::quiet_NaN();
  double L_f1 = unset;
  double k1 = unset;
  double k2 = unset;
  double L_f2 = unset;
  double L_h = unset;
  std::vector<double> L_I;
  std::vector<double> L_J;
  GrowthData growth;
};

// Full problem instance on the truncated eigenbasis.
struct ScenarioSpec {
  double alpha = 4.0 / 3.0;  // in (1, 2)
  double horizon = 1.0;      // b
  double history = 1.0;      // a
  int n_modes = 16;

  std::function<SpectralVector(double)> phi;  // history on [-a, 0]
  SpectralVector xi;                          // zeta'(0)
  NonlocalTerm h;

  StateMap f1;
  StateMap f2;
  std::function<double(double)> varrho;  // kernel of the inner convolution
  IntervalMap inclusion;
  DelayMap nu1, nu2, nu3;

  std::vector<ImpulseSpec> impulses;
  QWienerSpec noise;
  HypothesisConstants constants;

  double r() const { return alpha / 2.0; }
  std::vector<double> impulse_points() const;
  void validate() const;
};

// Uniform sampling of the basis functions on [0, pi]: synthesizes pointwise
// values of zeta(x, z) from mode coefficients and projects pointwise
// nonlinearities back (composite trapezoid in z).
class SineBasisSampler {
 public:
  SineBasisSampler(int n_modes, int n_z = 128);

  int n_modes() const { return n_modes_; }
  int n_z() const { return n_z_; }

  void synthesize(const SpectralVector& v, std::vector<double>& values) const;
  void project(const std::vector<double>& values, SpectralVector& out) const;

 private:
  int n_modes_;
  int n_z_;
  std::vector<double> basis_;    // [z * n_modes + n], e_n(z_q)
  std::vector<double> weights_;  // trapezoid weights on [0, pi]
};

// Function-form builders used by the configuration layer and tests.
StateMap make_zero_map();
// Per-mode linear map kappa * zeta_n (no delay dependence).
StateMap make_linear_map(double kappa);
// Neutral coefficient of the spatial example:
//   2 e^{-x} sin(x) / (sqrt(3) + |zeta(x,z)| + |zeta_delayed(z)|), pointwise in z.
StateMap make_example51_f1(std::shared_ptr<const SineBasisSampler> sampler, double scale);
// Forcing coefficient of the spatial example:
//   (|zeta| + |zeta_d|) / (5 pi + |zeta| + |zeta_d|), pointwise in z.
StateMap make_example51_f2(std::shared_ptr<const SineBasisSampler> sampler, double scale);

// Interval map builders.
IntervalMap make_degenerate_inclusion(const StateMap& center);
IntervalMap make_example51_inclusion(double center_scale, double half_width);

// Impulse builders.
JumpFunctional make_vector_jump(SpectralVector v);
// Integral kernel jump of the spatial example with constant kernel beta:
// jump = beta * int_{-a}^{x_p} zeta(s) ds (trapezoid over history + path).
JumpFunctional make_integral_jump(double beta);

// Delay builders.
DelayMap make_no_delay();
DelayMap make_lag_delay(double lag, double history_depth);

}  // namespace fsic
