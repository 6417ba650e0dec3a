#include "fsic/spectral_model.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "fsic/stochastic.hpp"

namespace fsic {

namespace {

void check_same_size(const SpectralVector& a, const SpectralVector& b) {
  if (a.size() != b.size()) {
    throw DimensionMismatch("spectral vectors of size " + std::to_string(a.size()) +
                            " and " + std::to_string(b.size()));
  }
}

}  // namespace

SpectralVector& SpectralVector::operator+=(const SpectralVector& o) {
  check_same_size(*this, o);
  for (int i = 0; i < size(); ++i) c[i] += o.c[i];
  return *this;
}

SpectralVector& SpectralVector::operator-=(const SpectralVector& o) {
  check_same_size(*this, o);
  for (int i = 0; i < size(); ++i) c[i] -= o.c[i];
  return *this;
}

SpectralVector& SpectralVector::operator*=(double s) {
  for (double& v : c) v *= s;
  return *this;
}

SpectralVector operator+(SpectralVector a, const SpectralVector& b) { return a += b; }
SpectralVector operator-(SpectralVector a, const SpectralVector& b) { return a -= b; }
SpectralVector operator*(double s, SpectralVector a) { return a *= s; }

double dot(const SpectralVector& a, const SpectralVector& b) {
  check_same_size(a, b);
  double acc = 0.0;
  for (int i = 0; i < a.size(); ++i) acc += a.c[i] * b.c[i];
  return acc;
}

double norm2(const SpectralVector& v) {
  double acc = 0.0;
  for (double x : v.c) acc += x * x;
  return acc;
}

SpectralSpace SpectralSpace::dirichlet(int n_modes) {
  if (n_modes < 1) throw ValidationError("n_modes", "must be >= 1");
  SpectralSpace space;
  space.n_modes = n_modes;
  space.eigenvalues.resize(n_modes);
  for (int n = 1; n <= n_modes; ++n) {
    space.eigenvalues[n - 1] = -static_cast<double>(n) * n;
  }
  return space;
}

SpectralVector cosine_apply(double x, const SpectralVector& v) {
  SpectralVector out(v.size());
  for (int i = 0; i < v.size(); ++i) {
    out.c[i] = std::cos((i + 1) * x) * v.c[i];
  }
  return out;
}

SpectralVector sine_apply(double x, const SpectralVector& v) {
  SpectralVector out(v.size());
  for (int i = 0; i < v.size(); ++i) {
    const int n = i + 1;
    out.c[i] = std::sin(n * x) / n * v.c[i];
  }
  return out;
}

FractionalFamilies::FractionalFamilies(double r, int n_modes, SeriesControl ctl)
    : r_(r),
      n_modes_(n_modes),
      ctl_(ctl),
      ml_c_(2.0 * r, 1.0, ctl),
      ml_s_(2.0 * r, 2.0, ctl),
      ml_p_(2.0 * r, 2.0 * r, ctl) {
  if (!(r > 0.5 && r < 1.0)) throw ValidationError("r", "must lie strictly in (0.5, 1)");
  if (n_modes < 1) throw ValidationError("n_modes", "must be >= 1");
}

double FractionalFamilies::c_exact(int mode, double x) const {
  const double n = mode + 1.0;
  if (x == 0.0) return 1.0;
  return ml_c_(-n * n * std::pow(x, 2.0 * r_));
}

double FractionalFamilies::s_exact(int mode, double x) const {
  const double n = mode + 1.0;
  if (x == 0.0) return 0.0;
  return x * ml_s_(-n * n * std::pow(x, 2.0 * r_));
}

double FractionalFamilies::p_exact(int mode, double x) const {
  const double n = mode + 1.0;
  if (x == 0.0) return 0.0;
  return std::pow(x, 2.0 * r_ - 1.0) * ml_p_(-n * n * std::pow(x, 2.0 * r_));
}

void FractionalFamilies::eval_all(double x, double* cs, double* ss, double* ps) const {
  for (int m = 0; m < n_modes_; ++m) {
    cs[m] = c_exact(m, x);
    ss[m] = s_exact(m, x);
    ps[m] = p_exact(m, x);
  }
}

void FractionalFamilies::prime_grid(const TimeGrid& grid) {
  delta_ = grid.uniform_delta();
  n_uniform_ = grid.steps;

  const int stride = 3 * n_modes_;
  cache_uniform_.assign(static_cast<std::size_t>(n_uniform_ + 1) * stride, 0.0);
  for (int k = 0; k <= n_uniform_; ++k) {
    double* row = cache_uniform_.data() + static_cast<std::size_t>(k) * stride;
    eval_all(k * delta_, row, row + n_modes_, row + 2 * n_modes_);
  }

  // Exact values at every pairwise node difference that is not a uniform
  // multiple (impulse offsets).
  std::vector<double> unique_times;
  unique_times.reserve(grid.num_nodes());
  for (const auto& node : grid.nodes) {
    if (unique_times.empty() || node.t > unique_times.back() + 1e-12 * grid.horizon) {
      unique_times.push_back(node.t);
    }
  }
  const double tol = 1e-9 * delta_;
  std::vector<double> diffs;
  for (std::size_t i = 0; i < unique_times.size(); ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double d = unique_times[i] - unique_times[j];
      const double k = std::round(d / delta_);
      if (std::fabs(d - k * delta_) <= tol) continue;  // uniform cache covers it
      diffs.push_back(d);
    }
  }
  std::sort(diffs.begin(), diffs.end());
  extra_times_.clear();
  for (double d : diffs) {
    if (extra_times_.empty() || d > extra_times_.back() + tol) extra_times_.push_back(d);
  }
  cache_extra_.assign(extra_times_.size() * stride, 0.0);
  for (std::size_t e = 0; e < extra_times_.size(); ++e) {
    double* row = cache_extra_.data() + e * stride;
    eval_all(extra_times_[e], row, row + n_modes_, row + 2 * n_modes_);
  }
}

double FractionalFamilies::lookup(int family, int mode, double x) const {
  if (mode < 0 || mode >= n_modes_) {
    throw DimensionMismatch("mode " + std::to_string(mode) + " out of range");
  }
  if (x < 0.0) {
    if (x > -1e-12) x = 0.0;
    else throw ValidationError("x", "family argument must be >= 0");
  }
  auto exact = [&](double t) {
    switch (family) {
      case 0: return c_exact(mode, t);
      case 1: return s_exact(mode, t);
      default: return p_exact(mode, t);
    }
  };
  if (delta_ <= 0.0) return exact(x);

  const int stride = 3 * n_modes_;
  const double tol = 1e-9 * delta_;
  const double kf = std::round(x / delta_);
  const int k = static_cast<int>(kf);
  if (k >= 0 && k <= n_uniform_ && std::fabs(x - k * delta_) <= tol) {
    return cache_uniform_[static_cast<std::size_t>(k) * stride + family * n_modes_ + mode];
  }
  auto it = std::lower_bound(extra_times_.begin(), extra_times_.end(), x - tol);
  if (it != extra_times_.end() && std::fabs(*it - x) <= tol) {
    const std::size_t e = static_cast<std::size_t>(it - extra_times_.begin());
    return cache_extra_[e * stride + family * n_modes_ + mode];
  }
  const int lo = static_cast<int>(std::floor(x / delta_));
  if (lo < 0 || lo + 1 > n_uniform_) return exact(x);
  const double w = (x - lo * delta_) / delta_;
  const double v0 =
      cache_uniform_[static_cast<std::size_t>(lo) * stride + family * n_modes_ + mode];
  const double v1 =
      cache_uniform_[static_cast<std::size_t>(lo + 1) * stride + family * n_modes_ + mode];
  return (1.0 - w) * v0 + w * v1;
}

double FractionalFamilies::c(int mode, double x) const { return lookup(0, mode, x); }
double FractionalFamilies::s(int mode, double x) const { return lookup(1, mode, x); }
double FractionalFamilies::p(int mode, double x) const { return lookup(2, mode, x); }

const SubordinationPlan& FractionalFamilies::plan() const {
  static std::mutex plan_mutex;
  std::lock_guard<std::mutex> lock(plan_mutex);
  if (!plan_) {
    plan_ = std::make_shared<const SubordinationPlan>(r_, ctl_);
  }
  return *plan_;
}

double FractionalFamilies::c_subordination(int mode, double x) const {
  const double n = mode + 1.0;
  const double xr = std::pow(x, r_);
  return plan().integrate([&](double theta) { return std::cos(n * xr * theta); });
}

double FractionalFamilies::p_subordination(int mode, double x) const {
  if (x == 0.0) return 0.0;
  const double n = mode + 1.0;
  const double xr = std::pow(x, r_);
  const double prefactor = std::pow(x, r_ - 1.0);
  return prefactor * plan().integrate([&](double theta) {
    return r_ * theta * std::sin(n * xr * theta) / n;
  });
}

double FractionalFamilies::mainardi_norm() const { return plan().norm(); }

SpectralVector frac_family_eval(const FractionalFamilies& fam, Family which, double x,
                                const SpectralVector& v) {
  if (v.size() != fam.n_modes()) {
    throw DimensionMismatch("frac_family_eval: vector size " + std::to_string(v.size()) +
                            " != n_modes " + std::to_string(fam.n_modes()));
  }
  SpectralVector out(v.size());
  for (int m = 0; m < v.size(); ++m) {
    double mult = 0.0;
    switch (which) {
      case Family::Cr: mult = fam.c(m, x); break;
      case Family::Sr: mult = fam.s(m, x); break;
      case Family::Pr: mult = fam.p(m, x); break;
    }
    out.c[m] = mult * v.c[m];
  }
  return out;
}

BoundConstants bound_constants(const FractionalFamilies& fam, double b) {
  if (!(b > 0.0)) throw ValidationError("b", "must be > 0");
  double sup_c2 = 1.0;
  if (fam.primed()) {
    const int steps = static_cast<int>(std::round(b / fam.grid_delta()));
    for (int k = 0; k <= steps; ++k) {
      const double x = k * fam.grid_delta();
      for (int m = 0; m < fam.n_modes(); ++m) {
        sup_c2 = std::max(sup_c2, fam.c(m, x) * fam.c(m, x));
      }
    }
  } else {
    const int steps = 256;
    for (int k = 0; k <= steps; ++k) {
      const double x = b * k / steps;
      for (int m = 0; m < fam.n_modes(); ++m) {
        const double v = fam.c_exact(m, x);
        sup_c2 = std::max(sup_c2, v * v);
      }
    }
  }
  BoundConstants bc;
  bc.M1 = sup_c2;
  bc.M2 = bc.M1 * b;
  bc.M3 = bc.M1 * std::pow(b, fam.r()) / std::tgamma(2.0 * fam.r());
  bc.M4 = b_norm_squared(fam.n_modes());
  return bc;
}

SpectralVector b_apply(const SpectralVector& u) {
  SpectralVector out(u.size());
  if (u.size() >= 2) {
    out.c[0] = 2.0 * u.c[1];
    for (int i = 1; i < u.size(); ++i) out.c[i] = u.c[i];
  }
  return out;
}

SpectralVector b_star_apply(const SpectralVector& v) {
  SpectralVector out(v.size());
  if (v.size() >= 2) {
    out.c[1] = 2.0 * v.c[0] + v.c[1];
    for (int i = 2; i < v.size(); ++i) out.c[i] = v.c[i];
  }
  return out;
}

double b_norm_squared(int n_modes) {
  if (n_modes < 2) return 0.0;
  // B B* restricted to modes {1,2} is [[4,2],[2,1]] (eigenvalues 5 and 0);
  // the identity tail contributes 1.
  return 5.0;
}

}  // namespace fsic
