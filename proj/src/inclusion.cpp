#include "fsic/inclusion.hpp"

#include <algorithm>
#include <cmath>

#include "fsic/scenario.hpp"

namespace fsic {

double hausdorff_interval(const Interval& a, const Interval& b) {
  if (!(a.lo <= a.hi) || !(b.lo <= b.hi)) {
    throw InvalidInterval("hausdorff_interval: interval endpoints out of order");
  }
  return std::max(std::fabs(a.lo - b.lo), std::fabs(a.hi - b.hi));
}

void IntervalMap::eval(double x, const SpectralVector& now, const SpectralVector& delayed,
                       std::vector<double>& lo, std::vector<double>& hi) const {
  lo.assign(now.size(), 0.0);
  hi.assign(now.size(), 0.0);
  if (bounds) bounds(x, now, delayed, lo, hi);
}

SelectionKind selection_kind_from_string(const std::string& name) {
  if (name == "lower") return SelectionKind::Lower;
  if (name == "upper") return SelectionKind::Upper;
  if (name == "midpoint") return SelectionKind::Midpoint;
  if (name == "random") return SelectionKind::Random;
  throw ValidationError("selection", "unknown strategy '" + name + "'");
}

std::string to_string(SelectionKind kind) {
  switch (kind) {
    case SelectionKind::Lower: return "lower";
    case SelectionKind::Upper: return "upper";
    case SelectionKind::Midpoint: return "midpoint";
    case SelectionKind::Random: return "random";
  }
  return "midpoint";
}

SpectralVector select(const IntervalMap& map, const SelectionStrategy& strat, double x,
                      const SpectralVector& now, const SpectralVector& delayed,
                      std::uint64_t sample_index, int node_index) {
  std::vector<double> lo, hi;
  map.eval(x, now, delayed, lo, hi);
  SpectralVector g(now.size());
  for (int m = 0; m < now.size(); ++m) {
    if (lo[m] > hi[m]) {
      throw EmptyInterval("selection interval empty at mode " + std::to_string(m + 1) +
                          ", x=" + std::to_string(x));
    }
    switch (strat.kind) {
      case SelectionKind::Lower: g.c[m] = lo[m]; break;
      case SelectionKind::Upper: g.c[m] = hi[m]; break;
      case SelectionKind::Midpoint: g.c[m] = 0.5 * (lo[m] + hi[m]); break;
      case SelectionKind::Random: {
        const std::uint64_t key =
            PathRng::mix(strat.seed, (sample_index << 24) ^
                                         (static_cast<std::uint64_t>(node_index) << 8) ^
                                         static_cast<std::uint64_t>(m));
        const double u = (static_cast<double>(key >> 11) + 0.5) * 0x1.0p-53;
        g.c[m] = lo[m] + u * (hi[m] - lo[m]);
        break;
      }
    }
  }
  return g;
}

SelectionGapReport lipschitz_selection_gap(const IntervalMap& map,
                                           const SelectionStrategy& strat,
                                           const TimeGrid& grid, const Trajectory& z1,
                                           const Trajectory& z2, double w_hat,
                                           const std::vector<double>& nu3_at_nodes) {
  SelectionGapReport report;
  report.budget = w_hat * grid.horizon;

  double dist2 = 0.0;
  for (int k = 0; k < grid.num_nodes(); ++k) {
    dist2 = std::max(dist2, norm2(z1.states[k] - z2.states[k]));
  }
  if (dist2 == 0.0) {
    report.worst_ratio = 0.0;
    report.within = true;
    return report;
  }

  double cumulative = 0.0;
  double worst = 0.0;
  for (int k = 0; k < grid.num_steps(); ++k) {
    const double x = grid.time(k);
    const double d = nu3_at_nodes.empty() ? x : nu3_at_nodes[k];
    const SpectralVector g1 =
        select(map, strat, x, z1.states[k], z1.at_time(grid, d), 0, k);
    const SpectralVector g2 =
        select(map, strat, x, z2.states[k], z2.at_time(grid, d), 0, k);
    cumulative += norm2(g1 - g2) * grid.dt[k];
    worst = std::max(worst, cumulative / dist2);
  }
  report.worst_ratio = worst;
  report.within = worst <= report.budget + 1e-12;
  return report;
}

namespace {

SpectralVector random_state(PathRng& rng, int n_modes, double scale) {
  SpectralVector v(n_modes);
  for (int m = 0; m < n_modes; ++m) {
    v.c[m] = scale * (2.0 * rng.uniform() - 1.0) / (m + 1);
  }
  return v;
}

struct RatioTracker {
  double worst = 0.0;
  void update(double num, double den) {
    if (den > 1e-300) worst = std::max(worst, num / den);
    else if (num > 1e-300) worst = std::max(worst, std::numeric_limits<double>::infinity());
  }
};

}  // namespace

std::vector<HypothesisCheck> hypothesis_audit(const ScenarioSpec& scn, std::uint64_t seed,
                                              int samples) {
  scn.validate();
  const int n = scn.n_modes;
  PathRng rng(seed, 0xA0D17ULL);
  const HypothesisConstants& k = scn.constants;

  RatioTracker a2i, a2ii, a3iii, a3iv, a6, a8i, a8ii, a11;
  std::vector<RatioTracker> a7_lip(scn.impulses.size()), a7_bound(scn.impulses.size());
  double a4_sup = 0.0;
  double a11_zero = 0.0;

  SpectralVector f_out(n), f_out2(n);
  std::vector<double> lo1, hi1, lo2, hi2;

  const TimeGrid audit_grid = TimeGrid::make(scn.horizon, 64, scn.impulse_points());

  for (int s = 0; s < samples; ++s) {
    const double x = scn.horizon * rng.uniform();
    const SpectralVector z1 = random_state(rng, n, 2.0);
    const SpectralVector z2 = random_state(rng, n, 2.0);
    const SpectralVector d1 = random_state(rng, n, 2.0);
    const SpectralVector d2 = random_state(rng, n, 2.0);
    const double dist = norm2(z1 - z2) + norm2(d1 - d2);

    if (scn.f1) {
      scn.f1(x, z1, d1, f_out);
      scn.f1(x, z2, d2, f_out2);
      a2i.update(norm2(f_out - f_out2), dist);
      a2ii.update(norm2(f_out), 1.0 + norm2(z1) + norm2(d1));
    }
    if (scn.f2) {
      scn.f2(x, z1, d1, f_out);
      scn.f2(x, z2, d2, f_out2);
      a3iii.update(norm2(f_out - f_out2), dist);
      const double arg = norm2(z1) + norm2(d1);
      a3iv.update(norm2(f_out),
                  k.growth.theta * (k.growth.pounds0 + k.growth.pounds1 * arg));
    }
    if (scn.varrho) {
      const double v = scn.varrho(scn.horizon * rng.uniform());
      a4_sup = std::max(a4_sup, v * v);
    }
    if (scn.inclusion.bounds) {
      scn.inclusion.eval(x, z1, d1, lo1, hi1);
      scn.inclusion.eval(x, z2, d2, lo2, hi2);
      double worst_g2 = 0.0;
      double hd2 = 0.0;
      for (int m = 0; m < n; ++m) {
        if (lo1[m] > hi1[m] || lo2[m] > hi2[m]) {
          throw EmptyInterval("hypothesis_audit: interval bounds crossed");
        }
        worst_g2 += std::max(lo1[m] * lo1[m], hi1[m] * hi1[m]);
        const double hd = hausdorff_interval({lo1[m], hi1[m]}, {lo2[m], hi2[m]});
        hd2 += hd * hd;
      }
      const double arg = norm2(z1) + norm2(d1);
      a6.update(worst_g2, k.growth.wp * (k.growth.beta0 + k.growth.beta1 * arg));
      a11.update(hd2, dist);
    }
    if (!scn.h.taus.empty()) {
      // h is a linear functional of the path; audit it on two synthetic
      // trajectories that differ by (z1 - z2) at every node.
      Trajectory t1, t2;
      t1.states.assign(audit_grid.num_nodes(), z1);
      t2.states.assign(audit_grid.num_nodes(), z2);
      t1.hist_times = {-scn.history, 0.0};
      t1.hist_states = {z1, z1};
      t2.hist_times = {-scn.history, 0.0};
      t2.hist_states = {z2, z2};
      const SpectralVector h1 = scn.h.eval(audit_grid, t1, n);
      const SpectralVector h2 = scn.h.eval(audit_grid, t2, n);
      a8i.update(norm2(h1 - h2), norm2(z1 - z2));
      a8ii.update(norm2(h1), 1.0 + norm2(z1));
    }
    for (std::size_t p = 0; p < scn.impulses.size(); ++p) {
      Trajectory t1, t2;
      t1.states.assign(audit_grid.num_nodes(), z1);
      t2.states.assign(audit_grid.num_nodes(), z2);
      t1.hist_times = {-scn.history, 0.0};
      t1.hist_states = {z1, z1};
      t2.hist_times = {-scn.history, 0.0};
      t2.hist_states = {z2, z2};
      const int pre = audit_grid.post_node(static_cast<int>(p)) - 1;
      if (scn.impulses[p].state_jump) {
        const SpectralVector i1 = scn.impulses[p].state_jump(audit_grid, t1, pre);
        const SpectralVector i2 = scn.impulses[p].state_jump(audit_grid, t2, pre);
        a7_bound[p].update(norm2(i1), 1.0);
        a7_lip[p].update(norm2(i1 - i2), norm2(z1 - z2));
      }
      if (scn.impulses[p].velocity_jump) {
        const SpectralVector j1 = scn.impulses[p].velocity_jump(audit_grid, t1, pre);
        const SpectralVector j2 = scn.impulses[p].velocity_jump(audit_grid, t2, pre);
        a7_bound[p].update(norm2(j1), 1.0);
        a7_lip[p].update(norm2(j1 - j2), norm2(z1 - z2));
      }
    }
  }

  // (A11) also demands d(0, G(x, 0, 0)) <= w_hat(x) on the grid.
  if (scn.inclusion.bounds) {
    const SpectralVector zero(n);
    for (int gk = 0; gk <= 16; ++gk) {
      const double x = scn.horizon * gk / 16.0;
      scn.inclusion.eval(x, zero, zero, lo1, hi1);
      double d2 = 0.0;
      for (int m = 0; m < n; ++m) {
        double d = 0.0;
        if (lo1[m] > 0.0) d = lo1[m];
        else if (hi1[m] < 0.0) d = -hi1[m];
        d2 += d * d;
      }
      a11_zero = std::max(a11_zero, std::sqrt(d2));
    }
  }

  auto entry = [](std::string name, double configured, double observed,
                  bool pass) -> HypothesisCheck {
    return {std::move(name), configured, observed, pass};
  };
  const double slack = 1.0 + 1e-9;
  std::vector<HypothesisCheck> out;
  out.push_back(entry("A2.i f1 Lipschitz", k.L_f1, a2i.worst,
                      !std::isnan(k.L_f1) && a2i.worst <= k.L_f1 * slack));
  out.push_back(entry("A2.ii f1 growth", k.k1, a2ii.worst,
                      !std::isnan(k.k1) && a2ii.worst <= k.k1 * slack));
  out.push_back(entry("A3.iii f2 Lipschitz", k.L_f2, a3iii.worst,
                      !std::isnan(k.L_f2) && a3iii.worst <= k.L_f2 * slack));
  out.push_back(entry("A3.iv f2 growth", 1.0, a3iv.worst, a3iv.worst <= slack));
  out.push_back(entry("A4 varrho bound", k.growth.ell, a4_sup,
                      a4_sup <= k.growth.ell * slack));
  out.push_back(entry("A6 inclusion growth", 1.0, a6.worst, a6.worst <= slack));
  out.push_back(entry("A8.i h Lipschitz", k.L_h, a8i.worst,
                      !std::isnan(k.L_h) && a8i.worst <= k.L_h * slack));
  out.push_back(entry("A8.ii h growth", k.L_h, a8ii.worst,
                      !std::isnan(k.L_h) && a8ii.worst <= k.L_h * slack));
  for (std::size_t p = 0; p < scn.impulses.size(); ++p) {
    const double li = p < k.L_I.size() ? k.L_I[p] : HypothesisConstants::unset;
    const double lj = p < k.L_J.size() ? k.L_J[p] : li;
    const double cap = std::isnan(lj) ? li : std::max(li, lj);
    const double worst = std::max(a7_bound[p].worst, a7_lip[p].worst);
    out.push_back(entry("A7 impulse " + std::to_string(p + 1), cap, worst,
                        !std::isnan(cap) && worst <= cap * slack));
  }
  out.push_back(entry("A11 inclusion Lipschitz", k.growth.w_hat, a11.worst,
                      a11.worst <= k.growth.w_hat * slack));
  out.push_back(entry("A11 zero distance", k.growth.w_hat, a11_zero,
                      a11_zero <= k.growth.w_hat * slack));
  return out;
}

}  // namespace fsic
