#include "fsic/stochastic.hpp"

#include <algorithm>
#include <cmath>

namespace fsic {

double QWienerSpec::trace() const {
  double acc = 0.0;
  for (double q : variances) acc += q;
  return acc;
}

void QWienerSpec::validate() const {
  for (double q : variances) {
    if (!(q >= 0.0) || !std::isfinite(q)) {
      throw ValidationError("q", "covariance eigenvalues must be finite and >= 0");
    }
  }
}

TimeGrid TimeGrid::make(double b, int steps, std::vector<double> impulse_points) {
  if (!(b > 0.0)) throw ValidationError("b", "horizon must be > 0");
  if (steps < 1) throw ValidationError("steps", "must be >= 1");
  for (std::size_t p = 0; p < impulse_points.size(); ++p) {
    const double xp = impulse_points[p];
    if (!(xp > 0.0 && xp < b)) {
      throw ValidationError("impulse_points", "must lie strictly inside (0, b)");
    }
    if (p > 0 && !(xp > impulse_points[p - 1])) {
      throw ValidationError("impulse_points", "must be strictly increasing");
    }
  }

  TimeGrid grid;
  grid.horizon = b;
  grid.steps = steps;
  grid.impulse_points = impulse_points;

  const double tol = 1e-12 * b;
  std::vector<double> times;
  times.reserve(steps + 1 + impulse_points.size());
  for (int k = 0; k <= steps; ++k) times.push_back(b * k / steps);
  times.insert(times.end(), impulse_points.begin(), impulse_points.end());
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end(),
                          [&](double x, double y) { return std::fabs(x - y) <= tol; }),
              times.end());

  auto impulse_at = [&](double t) -> int {
    for (std::size_t p = 0; p < impulse_points.size(); ++p) {
      if (std::fabs(impulse_points[p] - t) <= tol) return static_cast<int>(p);
    }
    return -1;
  };

  for (double t : times) {
    const int p = impulse_at(t);
    if (p >= 0) {
      grid.nodes.push_back({t, NodeKind::PreImpulse, p});
      grid.nodes.push_back({t, NodeKind::PostImpulse, p});
    } else {
      grid.nodes.push_back({t, NodeKind::Regular, -1});
    }
  }
  grid.dt.resize(grid.nodes.size() - 1);
  for (std::size_t k = 0; k + 1 < grid.nodes.size(); ++k) {
    grid.dt[k] = grid.nodes[k + 1].t - grid.nodes[k].t;
  }
  return grid;
}

int TimeGrid::post_node(int p) const {
  for (int k = 0; k < num_nodes(); ++k) {
    if (nodes[k].impulse == p && nodes[k].kind == NodeKind::PostImpulse) return k;
  }
  throw GridMismatch("impulse index " + std::to_string(p) + " not present in grid");
}

SpectralVector Trajectory::at_time(const TimeGrid& grid, double t) const {
  if (t < grid.nodes.front().t) {
    // History segment.
    if (hist_times.empty()) {
      throw GridMismatch("trajectory has no history segment for t <= 0");
    }
    if (t <= hist_times.front()) return hist_states.front();
    if (t >= hist_times.back()) return hist_states.back();
    auto it = std::lower_bound(hist_times.begin(), hist_times.end(), t);
    const std::size_t j = static_cast<std::size_t>(it - hist_times.begin());
    if (*it == t) return hist_states[j];
    const double w = (t - hist_times[j - 1]) / (hist_times[j] - hist_times[j - 1]);
    SpectralVector out = hist_states[j - 1];
    for (int m = 0; m < out.size(); ++m) {
      out.c[m] = (1.0 - w) * hist_states[j - 1].c[m] + w * hist_states[j].c[m];
    }
    return out;
  }
  if (t >= grid.nodes.back().t) return states.back();
  // First node with time >= t; on an exact impulse hit this is the pre node,
  // which keeps zeta left continuous.
  int lo = 0, hi = grid.num_nodes() - 1;
  while (lo < hi) {
    const int mid = (lo + hi) / 2;
    if (grid.nodes[mid].t < t) lo = mid + 1;
    else hi = mid;
  }
  const int j = lo;
  if (grid.nodes[j].t == t || j == 0) return states[j];
  const double t0 = grid.nodes[j - 1].t;
  const double t1 = grid.nodes[j].t;
  const double w = (t - t0) / (t1 - t0);
  SpectralVector out(states[j].size());
  for (int m = 0; m < out.size(); ++m) {
    out.c[m] = (1.0 - w) * states[j - 1].c[m] + w * states[j].c[m];
  }
  return out;
}

MonteCarloEstimate estimate_from(std::span<const double> values, std::uint64_t seed) {
  MonteCarloEstimate est;
  est.samples = static_cast<int>(values.size());
  est.seed = seed;
  if (values.empty()) return est;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= values.size();
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  est.mean = mean;
  est.std_error =
      values.size() > 1 ? std::sqrt(ss / (values.size() - 1.0) / values.size()) : 0.0;
  return est;
}

std::uint64_t PathRng::mix(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t s = seed ^ (0x9E3779B97F4A7C15ULL * (index + 0x632BE59BD9B4E019ULL));
  auto round = [](std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  };
  return round(round(s));
}

PathRng::PathRng(std::uint64_t seed, std::uint64_t index) : engine_(mix(seed, index)) {}

double PathRng::uniform() {
  // (0, 1]: never returns 0, so log() below is safe.
  return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
}

double PathRng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * 3.14159265358979323846 * u2;
  spare_ = radius * std::sin(angle);
  have_spare_ = true;
  return radius * std::cos(angle);
}

std::vector<double> wiener_increments(const QWienerSpec& spec, const TimeGrid& grid,
                                      std::uint64_t seed, std::uint64_t index) {
  spec.validate();
  const int n_modes = static_cast<int>(spec.variances.size());
  PathRng rng(seed, index);
  std::vector<double> increments(static_cast<std::size_t>(grid.num_steps()) * n_modes);
  for (int k = 0; k < grid.num_steps(); ++k) {
    for (int n = 0; n < n_modes; ++n) {
      const double z = rng.normal();
      increments[static_cast<std::size_t>(k) * n_modes + n] =
          std::sqrt(spec.variances[n] * grid.dt[k]) * z;
    }
  }
  return increments;
}

SpectralVector ito_integral(const AdaptedIntegrand& integrand, const TimeGrid& grid,
                            std::span<const double> increments, int n_modes) {
  if (increments.size() != static_cast<std::size_t>(grid.num_steps()) * n_modes) {
    throw GridMismatch("increment buffer does not match grid/mode count");
  }
  SpectralVector out(n_modes);
  std::vector<double> chi(n_modes);
  for (int k = 0; k < grid.num_steps(); ++k) {
    IncrementView past(increments, n_modes, k);
    integrand(k, past, chi);
    for (int n = 0; n < n_modes; ++n) {
      out.c[n] += chi[n] * increments[static_cast<std::size_t>(k) * n_modes + n];
    }
  }
  return out;
}

MomentBoundReport moment_bound_check(std::span<const double> chi, const TimeGrid& grid,
                                     const QWienerSpec& spec, int samples,
                                     std::uint64_t seed) {
  const int n_modes = static_cast<int>(spec.variances.size());
  if (chi.size() < static_cast<std::size_t>(grid.num_steps()) * n_modes) {
    throw GridMismatch("chi values must cover every step and mode");
  }
  MomentBoundReport report;
  for (int k = 0; k < grid.num_steps(); ++k) {
    for (int n = 0; n < n_modes; ++n) {
      const double v = chi[static_cast<std::size_t>(k) * n_modes + n];
      report.rhs += spec.variances[n] * v * v * grid.dt[k];
    }
  }
  std::vector<double> sq(samples);
  AdaptedIntegrand integrand = [&](int node, const IncrementView&, std::span<double> out) {
    for (int n = 0; n < n_modes; ++n) {
      out[n] = chi[static_cast<std::size_t>(node) * n_modes + n];
    }
  };
  for (int s = 0; s < samples; ++s) {
    const auto incs = wiener_increments(spec, grid, seed, static_cast<std::uint64_t>(s));
    sq[s] = norm2(ito_integral(integrand, grid, incs, n_modes));
  }
  const MonteCarloEstimate est = estimate_from(sq, seed);
  report.lhs = est.mean;
  report.lhs_se = est.std_error;
  report.pass = report.lhs <= report.rhs + 3.0 * report.lhs_se;
  return report;
}

}  // namespace fsic
