#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "fsic/errors.hpp"
#include "fsic/special_functions.hpp"

namespace fsic {

// Coordinates of a state on the truncated eigenbasis e_n(z) = sqrt(2/pi) sin(nz).
struct SpectralVector {
  std::vector<double> c;

  SpectralVector() = default;
  explicit SpectralVector(int n_modes, double fill = 0.0) : c(n_modes, fill) {}
  static SpectralVector unit(int n_modes, int mode, double value = 1.0) {
    SpectralVector v(n_modes);
    v.c.at(mode) = value;
    return v;
  }

  int size() const { return static_cast<int>(c.size()); }
  double& operator[](int i) { return c[i]; }
  double operator[](int i) const { return c[i]; }

  SpectralVector& operator+=(const SpectralVector& o);
  SpectralVector& operator-=(const SpectralVector& o);
  SpectralVector& operator*=(double s);
};

SpectralVector operator+(SpectralVector a, const SpectralVector& b);
SpectralVector operator-(SpectralVector a, const SpectralVector& b);
SpectralVector operator*(double s, SpectralVector a);
double dot(const SpectralVector& a, const SpectralVector& b);
double norm2(const SpectralVector& v);  // squared Euclidean norm

// Dirichlet Laplacian eigenstructure on [0, pi]: lambda_n = -n^2, n = 1..N.
struct SpectralSpace {
  int n_modes;
  std::vector<double> eigenvalues;

  static SpectralSpace dirichlet(int n_modes);
};

// C(x): coefficient n multiplied by cos(n x).
SpectralVector cosine_apply(double x, const SpectralVector& v);
// S(x): coefficient n multiplied by sin(n x) / n.
SpectralVector sine_apply(double x, const SpectralVector& v);

enum class Family : std::uint8_t { Cr, Sr, Pr };

// (A1) envelope constants. M1 >= 1, M2 = M1 b, M3 = M1 b^r / Gamma(2r),
// M4 = |B|^2.
struct BoundConstants {
  double M1;
  double M2;
  double M3;
  double M4;
};

struct TimeGrid;  // stochastic.hpp

// Per-mode evaluators of the fractional families:
//   c_n(x) = E_{2r}(-n^2 x^{2r})
//   s_n(x) = x E_{2r,2}(-n^2 x^{2r})          (= int_0^x c_n)
//   p_n(x) = x^{2r-1} E_{2r,2r}(-n^2 x^{2r})
// The Mittag-Leffler series is the default route; the subordination
// quadrature against the Mainardi kernel is kept as the verification path.
// Evaluations are cached on the uniform solver grid plus the exact set of
// node differences; other arguments interpolate linearly between uniform
// nodes. Immutable after prime_grid(), shareable across workers.
class FractionalFamilies {
 public:
  // Family values live in [-1, 1] while the series arguments reach
  // -n^2 b^{2r}; the default control trades a little absolute tolerance for
  // cancellation-guard headroom at high modes.
  static SeriesControl default_control() { return {512, 1e-8, 64}; }

  FractionalFamilies(double r, int n_modes, SeriesControl ctl = default_control());

  double r() const { return r_; }
  int n_modes() const { return n_modes_; }

  // Exact (series) evaluation, no cache involved.
  double c_exact(int mode, double x) const;
  double s_exact(int mode, double x) const;
  double p_exact(int mode, double x) const;

  // Cached evaluation; exact at primed offsets, linear interpolation between
  // uniform cache nodes otherwise (series fallback before any priming).
  double c(int mode, double x) const;
  double s(int mode, double x) const;
  double p(int mode, double x) const;

  // Subordination-quadrature verification route.
  double c_subordination(int mode, double x) const;
  double p_subordination(int mode, double x) const;
  double mainardi_norm() const;

  // Cache every pairwise node difference of the grid (and b itself).
  void prime_grid(const TimeGrid& grid);
  bool primed() const { return delta_ > 0.0; }
  double grid_delta() const { return delta_; }

  const SeriesControl& control() const { return ctl_; }

 private:
  double r_;
  int n_modes_;
  SeriesControl ctl_;
  MittagLefflerSeries ml_c_;   // E_{2r, 1}
  MittagLefflerSeries ml_s_;   // E_{2r, 2}
  MittagLefflerSeries ml_p_;   // E_{2r, 2r}
  mutable std::shared_ptr<const SubordinationPlan> plan_;  // built on demand, guarded

  double delta_ = 0.0;
  int n_uniform_ = 0;                    // cached multiples 0..n_uniform_ of delta_
  std::vector<double> cache_uniform_;    // [k * n_modes + mode], families interleaved
  std::vector<double> extra_times_;      // sorted, exact extra offsets
  std::vector<double> cache_extra_;

  void eval_all(double x, double* cs, double* ss, double* ps) const;
  double lookup(int family, int mode, double x) const;
  const SubordinationPlan& plan() const;
};

SpectralVector frac_family_eval(const FractionalFamilies& fam, Family which, double x,
                                const SpectralVector& v);

// sup-based (A1) constants over the primed grid; M4 from the control operator
// block.
BoundConstants bound_constants(const FractionalFamilies& fam, double b);

// Control operator of the spatial model: B u = 2 u_2 e_1 + sum_{n>=2} u_n e_n.
// Control vectors carry no n=1 channel (coefficient 0 expected).
SpectralVector b_apply(const SpectralVector& u);
// Adjoint: (B* v)_2 = 2 v_1 + v_2, (B* v)_n = v_n for n >= 3, (B* v)_1 = 0.
SpectralVector b_star_apply(const SpectralVector& v);
// |B|^2 (largest eigenvalue of B B*).
double b_norm_squared(int n_modes);

}  // namespace fsic
