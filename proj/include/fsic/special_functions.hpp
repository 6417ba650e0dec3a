#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "fsic/errors.hpp"

namespace fsic {

// Truncation and quadrature controls shared by the series evaluators and the
// subordination integrals.
struct SeriesControl {
  int max_terms = 256;
  double abs_tol = 1e-10;
  int quad_nodes = 64;  // Gauss-Legendre nodes per panel on the theta axis

  void validate() const;
};

// r = alpha/2 for alpha in (1,2); rho is the series index of the Wright-type
// density chi_rho.
struct SubordinationParams {
  double r;
  double rho;

  explicit SubordinationParams(double r_value) : r(r_value), rho(r_value) {
    if (!(r > 0.5 && r < 1.0)) {
      throw ValidationError("r", "must lie strictly in (0.5, 1)");
    }
  }
};

struct SeriesResult {
  double value = 0.0;
  bool converged = false;
  int terms = 0;
};

// chi_rho(z) = sum_{n>=0} (-z)^n / (n! Gamma(-rho*n + 1 - rho)) for z >= 0.
// Terms whose Gamma argument sits on a pole contribute zero (reciprocal-Gamma
// convention). Throws NonConvergent when the alternating series cannot reach
// abs_tol within max_terms or cancellation exhausts the working precision;
// in practice that means z beyond roughly 30 and the caller must shrink the
// quadrature domain.
double wright_chi(double rho, double z, const SeriesControl& ctl = {});
SeriesResult wright_chi_checked(double rho, double z, const SeriesControl& ctl = {});

// E_{alpha,beta}(z) = sum_{k>=0} z^k / Gamma(alpha*k + beta) by direct series
// with term-ratio monitoring. The working precision escalates from long
// double to __float128 when alternating cancellation would spoil abs_tol; the
// guarded safe range on the negative axis is roughly z >= -100 at alpha = 1.1
// widening to z >= -250 at alpha = 1.8. Outside it NonConvergent is thrown.
double mittag_leffler(double alpha, double beta, double z, const SeriesControl& ctl = {});
SeriesResult mittag_leffler_checked(double alpha, double beta, double z,
                                    const SeriesControl& ctl = {});

// Reusable E_{alpha,beta} series with cached term ratios (one multiply per
// term once constructed). This is what the spectral family cache calls.
class MittagLefflerSeries {
 public:
  MittagLefflerSeries(double alpha, double beta, SeriesControl ctl = {});

  double operator()(double z) const;
  SeriesResult checked(double z) const;

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }

 private:
  double alpha_;
  double beta_;
  SeriesControl ctl_;
  std::vector<long double> ratio_;  // ratio_[k] = Gamma(a k + b) / Gamma(a(k+1) + b)
  std::vector<__float128> ratio_q_;
};

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

// Precomputed quadrature of integrals \int_0^inf M_r(theta) f(theta) dtheta.
// Panels of width 1/2 cover [0, theta_max]; theta_max is found by doubling
// until the running integral of M_r settles below abs_tol.
class SubordinationPlan {
 public:
  SubordinationPlan(double r, const SeriesControl& ctl = {});

  double integrate(const std::function<double(double)>& f) const;
  // Kernel-weighted dot product against precomputed integrand samples.
  double integrate_samples(const std::vector<double>& f_at_nodes) const;

  double r() const { return r_; }
  double theta_max() const { return theta_max_; }
  double norm() const { return norm_; }  // integral of M_r itself
  const std::vector<double>& nodes() const { return nodes_; }

 private:
  double r_;
  double theta_max_;
  double norm_;
  std::vector<double> nodes_;
  std::vector<double> weights_;  // plain quadrature weights
  std::vector<double> kernel_;   // M_r at nodes
};

// One-shot form of the plan: \int_0^{theta_max} M_r(theta) f(theta) dtheta.
double subordinate(double r, const std::function<double(double)>& f,
                   const SeriesControl& ctl = {});

}  // namespace fsic
