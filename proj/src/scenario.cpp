#include "fsic/scenario.hpp"

#include <algorithm>
#include <cmath>

namespace fsic {

SpectralVector NonlocalTerm::eval(const TimeGrid& grid, const Trajectory& traj,
                                  int n_modes) const {
  SpectralVector out(n_modes);
  for (std::size_t i = 0; i < taus.size(); ++i) {
    SpectralVector v = traj.at_time(grid, taus[i]);
    v *= coeffs[i];
    out += v;
  }
  return out;
}

std::vector<double> ScenarioSpec::impulse_points() const {
  std::vector<double> pts;
  pts.reserve(impulses.size());
  for (const auto& imp : impulses) pts.push_back(imp.point);
  return pts;
}

void ScenarioSpec::validate() const {
  if (!(alpha > 1.0 && alpha < 2.0)) throw ValidationError("alpha", "must lie in (1, 2)");
  if (!(horizon > 0.0)) throw ValidationError("b", "must be > 0");
  if (!(history >= 0.0)) throw ValidationError("a", "must be >= 0");
  if (n_modes < 1) throw ValidationError("n_modes", "must be >= 1");
  if (xi.size() != n_modes) throw ValidationError("xi", "length must equal n_modes");
  if (static_cast<int>(noise.variances.size()) != n_modes) {
    throw ValidationError("q", "length must equal n_modes");
  }
  noise.validate();
  double prev = 0.0;
  for (const auto& imp : impulses) {
    if (!(imp.point > prev && imp.point < horizon)) {
      throw ValidationError("impulse_points",
                            "must be strictly increasing inside (0, b)");
    }
    prev = imp.point;
  }
  if (h.taus.size() != h.coeffs.size()) {
    throw ValidationError("h", "taus and coeffs must have equal length");
  }
  for (double tau : h.taus) {
    if (!(tau >= 0.0 && tau <= horizon)) {
      throw ValidationError("h_taus", "must lie in [0, b]");
    }
  }
}

SineBasisSampler::SineBasisSampler(int n_modes, int n_z) : n_modes_(n_modes), n_z_(n_z) {
  const double pi = 3.14159265358979323846;
  basis_.resize(static_cast<std::size_t>(n_z) * n_modes);
  weights_.resize(n_z);
  const double dz = pi / (n_z - 1);
  const double scale = std::sqrt(2.0 / pi);
  for (int q = 0; q < n_z; ++q) {
    const double z = q * dz;
    weights_[q] = (q == 0 || q == n_z - 1) ? 0.5 * dz : dz;
    for (int m = 0; m < n_modes; ++m) {
      basis_[static_cast<std::size_t>(q) * n_modes + m] = scale * std::sin((m + 1) * z);
    }
  }
}

void SineBasisSampler::synthesize(const SpectralVector& v, std::vector<double>& values) const {
  values.assign(n_z_, 0.0);
  for (int q = 0; q < n_z_; ++q) {
    const double* row = basis_.data() + static_cast<std::size_t>(q) * n_modes_;
    double acc = 0.0;
    for (int m = 0; m < n_modes_; ++m) acc += row[m] * v.c[m];
    values[q] = acc;
  }
}

void SineBasisSampler::project(const std::vector<double>& values, SpectralVector& out) const {
  out.c.assign(n_modes_, 0.0);
  for (int q = 0; q < n_z_; ++q) {
    const double* row = basis_.data() + static_cast<std::size_t>(q) * n_modes_;
    const double wv = weights_[q] * values[q];
    for (int m = 0; m < n_modes_; ++m) out.c[m] += row[m] * wv;
  }
}

StateMap make_zero_map() {
  return [](double, const SpectralVector&, const SpectralVector&, SpectralVector& out) {
    std::fill(out.c.begin(), out.c.end(), 0.0);
  };
}

StateMap make_linear_map(double kappa) {
  return [kappa](double, const SpectralVector& now, const SpectralVector&,
                 SpectralVector& out) {
    for (int m = 0; m < now.size(); ++m) out.c[m] = kappa * now.c[m];
  };
}

StateMap make_example51_f1(std::shared_ptr<const SineBasisSampler> sampler, double scale) {
  return [sampler, scale](double x, const SpectralVector& now, const SpectralVector& delayed,
                          SpectralVector& out) {
    thread_local std::vector<double> vn, vd, w;
    sampler->synthesize(now, vn);
    sampler->synthesize(delayed, vd);
    const double pref = scale * 2.0 * std::exp(-x) * std::sin(x);
    const double sqrt3 = 1.7320508075688772;
    w.resize(vn.size());
    for (std::size_t q = 0; q < vn.size(); ++q) {
      w[q] = pref / (sqrt3 + std::fabs(vn[q]) + std::fabs(vd[q]));
    }
    sampler->project(w, out);
  };
}

StateMap make_example51_f2(std::shared_ptr<const SineBasisSampler> sampler, double scale) {
  return [sampler, scale](double, const SpectralVector& now, const SpectralVector& delayed,
                          SpectralVector& out) {
    thread_local std::vector<double> vn, vd, w;
    sampler->synthesize(now, vn);
    sampler->synthesize(delayed, vd);
    const double five_pi = 5.0 * 3.14159265358979323846;
    w.resize(vn.size());
    for (std::size_t q = 0; q < vn.size(); ++q) {
      const double s = std::fabs(vn[q]) + std::fabs(vd[q]);
      w[q] = scale * s / (five_pi + s);
    }
    sampler->project(w, out);
  };
}

IntervalMap make_degenerate_inclusion(const StateMap& center) {
  IntervalMap map;
  map.bounds = [center](double x, const SpectralVector& now, const SpectralVector& delayed,
                        std::vector<double>& lo, std::vector<double>& hi) {
    SpectralVector c(now.size());
    center(x, now, delayed, c);
    for (int m = 0; m < now.size(); ++m) {
      lo[m] = c.c[m];
      hi[m] = c.c[m];
    }
  };
  return map;
}

IntervalMap make_example51_inclusion(double center_scale, double half_width) {
  IntervalMap map;
  map.bounds = [center_scale, half_width](double, const SpectralVector& now,
                                          const SpectralVector& delayed,
                                          std::vector<double>& lo, std::vector<double>& hi) {
    for (int m = 0; m < now.size(); ++m) {
      const double n2 = static_cast<double>(m + 1) * (m + 1);
      const double denom = 1.0 + std::fabs(now.c[m]) + std::fabs(delayed.c[m]);
      const double center = center_scale / n2 * now.c[m] / denom;
      const double width = half_width / n2;
      lo[m] = center - width;
      hi[m] = center + width;
    }
  };
  return map;
}

JumpFunctional make_vector_jump(SpectralVector v) {
  return [v](const TimeGrid&, const Trajectory&, int) { return v; };
}

JumpFunctional make_integral_jump(double beta) {
  return [beta](const TimeGrid& grid, const Trajectory& traj, int pre_node) {
    const int n = traj.n_modes();
    SpectralVector acc(n);
    // Trapezoid over the history segment [-a, 0].
    for (std::size_t j = 0; j + 1 < traj.hist_times.size(); ++j) {
      const double w = 0.5 * (traj.hist_times[j + 1] - traj.hist_times[j]);
      for (int m = 0; m < n; ++m) {
        acc.c[m] += w * (traj.hist_states[j].c[m] + traj.hist_states[j + 1].c[m]);
      }
    }
    // Trapezoid over the path [0, x_p]; zero-width impulse steps drop out.
    for (int k = 0; k < pre_node; ++k) {
      const double w = 0.5 * grid.dt[k];
      for (int m = 0; m < n; ++m) {
        acc.c[m] += w * (traj.states[k].c[m] + traj.states[k + 1].c[m]);
      }
    }
    acc *= beta;
    return acc;
  };
}

DelayMap make_no_delay() {
  return [](double x) { return x; };
}

DelayMap make_lag_delay(double lag, double history_depth) {
  return [lag, history_depth](double x) { return std::max(x - lag, -history_depth); };
}

}  // namespace fsic
