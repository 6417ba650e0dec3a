#include "fsic/special_functions.hpp"

#include <quadmath.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace fsic {

namespace {

constexpr long double kPiL = 3.14159265358979323846264338327950288L;
constexpr long double kEpsLong = 1.08e-19L;   // long double unit roundoff
constexpr long double kEpsQuad = 1.93e-34L;   // __float128 unit roundoff

// sin(pi w) with the integer part peeled off exactly, so near-pole arguments
// keep their structural smallness instead of inheriting argument-reduction
// error from a large pi*w product.
long double sin_pi(long double w) {
  const long double m = roundl(w);
  const long double f = w - m;
  const long double s = sinl(kPiL * f);
  const long long parity = static_cast<long long>(m);
  return (parity % 2 == 0) ? s : -s;
}

__float128 sin_pi(__float128 w) {
  const __float128 m = roundq(w);
  const __float128 f = w - m;
  const __float128 s = sinq(M_PIq * f);
  const long long parity = static_cast<long long>(m);
  return (parity % 2 == 0) ? s : -s;
}

long double abs_as_long(long double x) { return fabsl(x); }
long double abs_as_long(__float128 x) { return static_cast<long double>(fabsq(x)); }

struct WrightAccum {
  double value;
  bool converged;
  int terms;
  long double max_term;
};

// Accumulated roundoff is acceptable when it sits below the requested
// absolute tolerance or is negligible relative to the result (positive sums
// with a huge value are exact in the relative sense; only alternating
// cancellation needs the absolute guard).
bool roundoff_ok(double value, long double max_term, long double eps, double abs_tol) {
  const long double noise = max_term * eps * 8.0L;
  return noise <= abs_tol || noise <= fabsl((long double)value) * 1e-9L;
}

long double exp_of(long double x) { return expl(x); }
__float128 exp_of(__float128 x) { return expq(x); }
long double log_of(long double x) { return logl(x); }
__float128 log_of(__float128 x) { return logq(x); }
long double lgamma_of(long double x) { return lgammal(x); }
__float128 lgamma_of(__float128 x) { return lgammaq(x); }

// Terms are assembled in log magnitude + sign: for rho near 1 the factorial
// part underflows while the reciprocal-Gamma part overflows long before the
// product (the actual term) leaves range.
template <typename Real>
WrightAccum wright_sum(double rho, double z, const SeriesControl& ctl) {
  const Real rho_r = static_cast<Real>(rho);
  const Real log_pi = log_of(static_cast<Real>(kPiL));
  Real log_power = 0.0;  // log(z^n / n!)
  int sign_power = 1;
  Real sum = 0.0;
  long double max_term = 0.0L;
  long double prev_mag = std::numeric_limits<long double>::infinity();
  for (int n = 0; n < ctl.max_terms; ++n) {
    const Real w = Real(1) - rho_r - rho_r * Real(n);
    Real term = 0.0;
    if (w > Real(0.5)) {
      term = sign_power * exp_of(log_power - lgamma_of(w));
    } else {
      const Real s = sin_pi(w);
      if (s != Real(0)) {
        const Real ln_rg = log_of(s < Real(0) ? -s : s) - log_pi + lgamma_of(Real(1) - w);
        const int sign = (s < Real(0) ? -1 : 1) * sign_power;
        term = sign * exp_of(log_power + ln_rg);
      }
    }
    sum += term;
    const long double mag = abs_as_long(term);
    if (mag > max_term) max_term = mag;
    if (n > 0 && mag < ctl.abs_tol * 0.05 && prev_mag < ctl.abs_tol * 0.05) {
      return {static_cast<double>(sum), true, n + 1, max_term};
    }
    prev_mag = mag;
    log_power += log_of(static_cast<Real>(z)) - log_of(static_cast<Real>(n + 1));
    sign_power = -sign_power;
  }
  return {static_cast<double>(sum), false, ctl.max_terms, max_term};
}

}  // namespace

void SeriesControl::validate() const {
  if (!(abs_tol > 0.0)) throw ValidationError("abs_tol", "must be > 0");
  if (max_terms < 8) throw ValidationError("max_terms", "must be >= 8");
  if (quad_nodes < 2) throw ValidationError("quad_nodes", "must be >= 2");
}

SeriesResult wright_chi_checked(double rho, double z, const SeriesControl& ctl) {
  ctl.validate();
  if (!(rho > 0.0 && rho < 1.0)) throw ValidationError("rho", "must lie in (0,1)");
  if (!std::isfinite(z) || z < 0.0) throw ValidationError("z", "must be finite and >= 0");

  WrightAccum acc = wright_sum<long double>(rho, z, ctl);
  if (acc.converged && roundoff_ok(acc.value, acc.max_term, kEpsLong, ctl.abs_tol)) {
    return {acc.value, true, acc.terms};
  }

  // The long double pass either stopped on cancellation noise or lost too many
  // digits; redo in quad precision.
  WrightAccum accq = wright_sum<__float128>(rho, z, ctl);
  const bool precise = roundoff_ok(accq.value, accq.max_term, kEpsQuad, ctl.abs_tol);
  return {accq.value, accq.converged && precise, accq.terms};
}

double wright_chi(double rho, double z, const SeriesControl& ctl) {
  SeriesResult res = wright_chi_checked(rho, z, ctl);
  if (!res.converged) {
    throw NonConvergent("wright_chi: series did not settle below abs_tol at z=" +
                        std::to_string(z) + " (reduce the quadrature domain)");
  }
  return res.value;
}

MittagLefflerSeries::MittagLefflerSeries(double alpha, double beta, SeriesControl ctl)
    : alpha_(alpha), beta_(beta), ctl_(ctl) {
  ctl_.validate();
  if (!(alpha > 0.0 && alpha <= 2.0)) throw ValidationError("alpha", "must lie in (0,2]");
  if (!(beta > 0.0)) throw ValidationError("beta", "must be > 0");
  ratio_.resize(ctl_.max_terms);
  long double prev = lgammal(static_cast<long double>(beta));
  for (int k = 0; k < ctl_.max_terms; ++k) {
    long double next = lgammal(static_cast<long double>(alpha) * (k + 1) +
                               static_cast<long double>(beta));
    ratio_[k] = expl(prev - next);
    prev = next;
  }
  // Quad ratios are built eagerly so evaluation stays lock-free under
  // concurrent callers.
  ratio_q_.resize(ctl_.max_terms);
  __float128 prev_q = lgammaq(static_cast<__float128>(beta_));
  for (int k = 0; k < ctl_.max_terms; ++k) {
    __float128 next_q =
        lgammaq(static_cast<__float128>(alpha_) * (k + 1) + static_cast<__float128>(beta_));
    ratio_q_[k] = expq(prev_q - next_q);
    prev_q = next_q;
  }
}

SeriesResult MittagLefflerSeries::checked(double z) const {
  // Long double pass first; escalate when alternating cancellation would eat
  // into abs_tol.
  {
    long double term = expl(-lgammal(static_cast<long double>(beta_)));
    long double sum = 0.0L;
    long double max_term = 0.0L;
    for (int k = 0; k < ctl_.max_terms; ++k) {
      sum += term;
      const long double mag = fabsl(term);
      if (mag > max_term) max_term = mag;
      const long double next = term * z * ratio_[k];
      if (k > 0 && mag < ctl_.abs_tol * 0.01L && fabsl(next) <= mag) {
        if (roundoff_ok((double)sum, max_term, kEpsLong, ctl_.abs_tol)) {
          return {static_cast<double>(sum), true, k + 1};
        }
        break;
      }
      term = next;
    }
  }

  __float128 term = expq(-lgammaq(static_cast<__float128>(beta_)));
  __float128 sum = 0.0Q;
  long double max_term = 0.0L;
  int used = ctl_.max_terms;
  bool settled = false;
  for (int k = 0; k < ctl_.max_terms; ++k) {
    sum += term;
    const long double mag = static_cast<long double>(fabsq(term));
    if (mag > max_term) max_term = mag;
    const __float128 next = term * static_cast<__float128>(z) * ratio_q_[k];
    if (k > 0 && mag < ctl_.abs_tol * 0.01L &&
        static_cast<long double>(fabsq(next)) <= mag) {
      used = k + 1;
      settled = true;
      break;
    }
    term = next;
  }
  const bool precise = roundoff_ok((double)sum, max_term, kEpsQuad, ctl_.abs_tol);
  return {static_cast<double>(sum), settled && precise, used};
}

double MittagLefflerSeries::operator()(double z) const {
  SeriesResult res = checked(z);
  if (!res.converged) {
    throw NonConvergent("mittag_leffler: series unsafe at alpha=" + std::to_string(alpha_) +
                        " z=" + std::to_string(z) + " (outside declared range)");
  }
  return res.value;
}

SeriesResult mittag_leffler_checked(double alpha, double beta, double z,
                                    const SeriesControl& ctl) {
  MittagLefflerSeries series(alpha, beta, ctl);
  return series.checked(z);
}

double mittag_leffler(double alpha, double beta, double z, const SeriesControl& ctl) {
  MittagLefflerSeries series(alpha, beta, ctl);
  return series(z);
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    long double x = cosl(kPiL * (i + 0.75L) / (n + 0.5L));
    long double pp = 0.0L;
    for (int it = 0; it < 100; ++it) {
      long double p0 = 1.0L, p1 = 0.0L;
      for (int j = 0; j < n; ++j) {
        long double p2 = p1;
        p1 = p0;
        p0 = ((2.0L * j + 1.0L) * x * p1 - j * p2) / (j + 1);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0L);
      long double dx = p0 / pp;
      x -= dx;
      if (fabsl(dx) < 1e-19L) break;
    }
    nodes[i] = static_cast<double>(-x);
    nodes[n - 1 - i] = static_cast<double>(x);
    const double w = static_cast<double>(2.0L / ((1.0L - x * x) * pp * pp));
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
}

namespace {

// Chernoff bound on the Mainardi tail: for any lambda > 0,
//   int_{t0}^inf M_r dtheta <= exp(-lambda t0) * E_r(lambda),
// since the moment identity gives int_0^inf exp(lambda theta) M_r dtheta =
// E_r(lambda), a positive series free of cancellation.
struct MainardiTailBound {
  std::vector<std::pair<double, double>> ladder;  // (lambda, log E_r(lambda))

  MainardiTailBound(double r, const SeriesControl& ctl) {
    SeriesControl bound_ctl = ctl;
    bound_ctl.max_terms = std::max(ctl.max_terms, 2048);
    MittagLefflerSeries e_r(r, 1.0, bound_ctl);
    for (double lambda = 0.5; lambda <= 1024.0; lambda *= 2.0) {
      SeriesResult res = e_r.checked(lambda);
      if (!res.converged || !(res.value > 0.0)) break;
      ladder.emplace_back(lambda, std::log(res.value));
    }
  }

  double at(double t0) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [lambda, log_e] : ladder) {
      best = std::min(best, std::exp(-lambda * t0 + log_e));
    }
    return best;
  }
};

}  // namespace

SubordinationPlan::SubordinationPlan(double r, const SeriesControl& ctl) : r_(r) {
  ctl.validate();
  if (!(r > 0.5 && r < 1.0)) throw ValidationError("r", "must lie strictly in (0.5, 1)");

  // Kernel evaluations may legitimately need far more terms than the
  // caller's budget: past the hump the Wright terms decay like
  // (z rho^rho n^{rho-1})^n, which is slow for rho near 1. The requested
  // abs_tol is unchanged.
  SeriesControl kernel_ctl = ctl;
  kernel_ctl.max_terms = std::max(ctl.max_terms, 4096);

  // Analytic cap: beyond theta_cap the discarded tail mass is certified below
  // abs_tol, so the doubling never has to sample the kernel out there.
  const MainardiTailBound tail(r, ctl);
  double theta_cap = 0.5;
  while (theta_cap < 64.0 && tail.at(theta_cap) >= 0.5 * ctl.abs_tol) {
    theta_cap += 0.5;
  }
  if (theta_cap >= 64.0) {
    throw NonConvergent("subordinate: M_r tail mass not bounded below abs_tol by theta=64");
  }

  // For r near 1 the density falls off a cliff; past this point the series
  // can stop being certifiable while everything it could contribute is
  // already below tolerance, so such nodes are clamped to zero.
  double negligible_from = std::numeric_limits<double>::infinity();
  for (double g = 0.0; g <= theta_cap + 0.05; g += 0.05) {
    if (tail.at(g) < 0.25 * ctl.abs_tol) {
      negligible_from = g;
      break;
    }
  }

  std::vector<double> gl_nodes, gl_weights;
  gauss_legendre(ctl.quad_nodes, gl_nodes, gl_weights);

  const double panel = 0.5;
  double covered = 0.0;
  double running = 0.0;
  double prev_running = std::numeric_limits<double>::quiet_NaN();
  double target = std::min(1.0, theta_cap);

  while (true) {
    while (covered < target - 1e-12) {
      const double lo = covered;
      const double hi = covered + panel;
      for (int q = 0; q < ctl.quad_nodes; ++q) {
        const double theta = 0.5 * (hi - lo) * gl_nodes[q] + 0.5 * (hi + lo);
        const double w = 0.5 * (hi - lo) * gl_weights[q];
        const SeriesResult res = wright_chi_checked(r_, theta, kernel_ctl);
        double m = res.value;
        if (!res.converged) {
          if (theta >= negligible_from) {
            m = 0.0;
          } else {
            throw NonConvergent(
                "subordinate: Mainardi kernel not evaluable at theta=" +
                std::to_string(theta) + " for r=" + std::to_string(r_));
          }
        }
        nodes_.push_back(theta);
        weights_.push_back(w);
        kernel_.push_back(m);
        running += w * m;
      }
      covered = hi;
    }
    if (covered >= theta_cap - 1e-12) break;
    if (!std::isnan(prev_running) && std::fabs(running - prev_running) < ctl.abs_tol) {
      break;
    }
    prev_running = running;
    target = std::min(target * 2.0, theta_cap);
  }
  theta_max_ = covered;
  norm_ = running;
}

double SubordinationPlan::integrate(const std::function<double(double)>& f) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    acc += weights_[i] * kernel_[i] * f(nodes_[i]);
  }
  return acc;
}

double SubordinationPlan::integrate_samples(const std::vector<double>& f_at_nodes) const {
  if (f_at_nodes.size() != nodes_.size()) {
    throw DimensionMismatch("integrate_samples: sample count != node count");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    acc += weights_[i] * kernel_[i] * f_at_nodes[i];
  }
  return acc;
}

double subordinate(double r, const std::function<double(double)>& f,
                   const SeriesControl& ctl) {
  SubordinationPlan plan(r, ctl);
  return plan.integrate(f);
}

}  // namespace fsic
