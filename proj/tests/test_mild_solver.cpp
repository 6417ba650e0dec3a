#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "fsic/mild_solver.hpp"
#include "oracle_helpers.hpp"

using namespace fsic;

TEST_SUITE_BEGIN("mild_solver");

namespace {

// Minimal deterministic scenario: no nonlinearities, no inclusion, no noise.
ScenarioSpec bare_scenario(int n_modes, double alpha = 4.0 / 3.0) {
  ScenarioSpec scn;
  scn.alpha = alpha;
  scn.horizon = 1.0;
  scn.history = 1.0;
  scn.n_modes = n_modes;
  scn.xi = SpectralVector(n_modes);
  scn.noise.variances.assign(n_modes, 0.0);
  return scn;
}

std::shared_ptr<FractionalFamilies> primed_families(const ScenarioSpec& scn,
                                                    const TimeGrid& grid) {
  auto fam = std::make_shared<FractionalFamilies>(scn.r(), scn.n_modes);
  fam->prime_grid(grid);
  return fam;
}

}  // namespace

TEST_CASE("free evolution reduces to C_r phi0 + S_r xi") {
  ScenarioSpec scn = bare_scenario(3);
  SpectralVector phi0(3);
  phi0.c = {1.0, -0.4, 0.2};
  scn.phi = [phi0](double) { return phi0; };
  scn.xi.c = {0.3, 0.1, -0.2};

  const TimeGrid grid = TimeGrid::make(1.0, 64);
  auto fam = primed_families(scn, grid);
  const MildSolver solver(scn, grid, fam);

  Trajectory z0 = solver.initial_iterate();
  const Trajectory z1 =
      solver.rhs_eval(z0, {}, SelectionStrategy{SelectionKind::Midpoint, 0}, 0, {});
  for (int k = 0; k < grid.num_nodes(); ++k) {
    const double x = grid.time(k);
    for (int m = 0; m < 3; ++m) {
      const double expected = fam->c(m, x) * phi0.c[m] + fam->s(m, x) * scn.xi.c[m];
      CHECK(z1.states[k].c[m] == doctest::Approx(expected).epsilon(1e-13));
    }
  }
  CHECK(z1.states[0].c[0] == doctest::Approx(phi0.c[0]));  // zeta(0) = phi(0)
}

TEST_CASE("constant forcing matches the exact fractional convolution") {
  // f2 = c on a single active mode; zeta(b) = c int_0^b p_n(b-y) dy
  //                                        = c b^{2r} E_{2r,2r+1}(-n^2 b^{2r}).
  const double c_force = 0.8;
  const int mode = 2;  // n = 3
  const double r = 2.0 / 3.0;

  auto solve_at = [&](int steps) {
    ScenarioSpec scn = bare_scenario(4);
    scn.f2 = [&](double, const SpectralVector&, const SpectralVector&, SpectralVector& out) {
      std::fill(out.c.begin(), out.c.end(), 0.0);
      out.c[mode] = c_force;
    };
    const TimeGrid grid = TimeGrid::make(1.0, steps);
    auto fam = primed_families(scn, grid);
    const MildSolver solver(scn, grid, fam);
    SolverOptions opts;
    EnsembleResult res = picard_solve(solver, {}, opts, 1, 5);
    return res.terminals[0].c[mode];
  };

  const double coarse = solve_at(256);
  const double fine = solve_at(512);
  const double richardson = 2.0 * fine - coarse;
  const double n2 = (mode + 1.0) * (mode + 1.0);
  const double exact = c_force * oracle::mittag_leffler(2.0 * r, 2.0 * r + 1.0, -n2, 400);
  CHECK(richardson == doctest::Approx(exact).epsilon(1e-4));
  // First-order convergence toward the exact value.
  CHECK(std::fabs(fine - exact) < std::fabs(coarse - exact));
}

TEST_CASE("single vector impulse propagates through C_r(x - x_p)") {
  ScenarioSpec scn = bare_scenario(2);
  SpectralVector kick(2);
  kick.c = {0.5, -0.25};
  ImpulseSpec imp;
  imp.point = 0.5;
  imp.state_jump = make_vector_jump(kick);
  scn.impulses.push_back(imp);

  const TimeGrid grid = TimeGrid::make(1.0, 64, {0.5});
  auto fam = primed_families(scn, grid);
  const MildSolver solver(scn, grid, fam);
  SolverOptions opts;
  EnsembleResult res = picard_solve(solver, {}, opts, 1, 5, 1);
  const Trajectory& z = res.trajectories[0];

  const int post = grid.post_node(0);
  for (int k = 0; k < grid.num_nodes(); ++k) {
    const double x = grid.time(k);
    for (int m = 0; m < 2; ++m) {
      const double expected = k >= post ? fam->c(m, x - 0.5) * kick.c[m] : 0.0;
      CHECK(z.states[k].c[m] == doctest::Approx(expected).epsilon(1e-12));
    }
  }
  // Jump bookkeeping: right minus left equals the applied jump exactly.
  CHECK(z.states[post].c[0] - z.states[post - 1].c[0] == kick.c[0]);
  CHECK(z.states[post].c[1] - z.states[post - 1].c[1] == kick.c[1]);
}

TEST_CASE("integral impulse kernel equals the brute-force path quadrature") {
  ScenarioSpec scn = bare_scenario(2);
  SpectralVector phi0(2);
  phi0.c = {0.6, -0.3};
  scn.phi = [phi0](double t) {
    SpectralVector v = phi0;
    v *= (1.0 + 0.5 * t);
    return v;
  };
  scn.xi.c = {0.2, 0.4};
  const double beta0 = 0.35;
  ImpulseSpec imp;
  imp.point = 0.5;
  imp.state_jump = make_integral_jump(beta0);
  scn.impulses.push_back(imp);

  const TimeGrid grid = TimeGrid::make(1.0, 128, {0.5});
  auto fam = primed_families(scn, grid);
  const MildSolver solver(scn, grid, fam);
  SolverOptions opts;
  EnsembleResult res = picard_solve(solver, {}, opts, 1, 5, 1);
  const Trajectory& z = res.trajectories[0];

  const int post = grid.post_node(0);
  for (int m = 0; m < 2; ++m) {
    // Independent trapezoid sum over history + path up to the impulse point.
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < z.hist_times.size(); ++j) {
      acc += 0.5 * (z.hist_times[j + 1] - z.hist_times[j]) *
             (z.hist_states[j].c[m] + z.hist_states[j + 1].c[m]);
    }
    for (int k = 0; k < post - 1; ++k) {
      acc += 0.5 * grid.dt[k] * (z.states[k].c[m] + z.states[k + 1].c[m]);
    }
    const double jump = z.states[post].c[m] - z.states[post - 1].c[m];
    CHECK(jump == doctest::Approx(beta0 * acc).epsilon(1e-6));
  }
}

TEST_CASE("picard on a constant right-hand side settles immediately") {
  ScenarioSpec scn = bare_scenario(2);
  SpectralVector phi0(2);
  phi0.c = {0.4, 0.1};
  scn.phi = [phi0](double) { return phi0; };

  const TimeGrid grid = TimeGrid::make(1.0, 32);
  auto fam = primed_families(scn, grid);
  const MildSolver solver(scn, grid, fam);
  SolverOptions opts;
  EnsembleResult res = picard_solve(solver, {}, opts, 1, 5);
  CHECK(res.report.converged);
  CHECK(res.report.iterations <= 2);  // one productive sweep plus confirmation
  CHECK(res.report.final_gap <= opts.tol);
  CHECK(res.report.empirical_rate == 0.0);
}

TEST_CASE("linear forcing agrees with a dense-grid fixed point") {
  // Scalar mode with f2 = kappa zeta: the engine grid versus a brute-force
  // fine-grid iteration built directly from the series oracle.
  const double kappa = 0.4;
  const double r = 0.65;

  ScenarioSpec scn = bare_scenario(1, 2.0 * r);
  SpectralVector phi0(1, 1.0);
  scn.phi = [phi0](double) { return phi0; };
  scn.f2 = make_linear_map(kappa);

  const TimeGrid grid = TimeGrid::make(1.0, 256);
  auto fam = primed_families(scn, grid);
  const MildSolver solver(scn, grid, fam);
  SolverOptions opts;
  opts.tol = 1e-14;
  EnsembleResult res = picard_solve(solver, {}, opts, 1, 5);
  const double solver_terminal = res.terminals[0].c[0];

  const int fine = 2048;
  std::vector<double> c_tab(fine + 1), p_tab(fine + 1);
  for (int k = 0; k <= fine; ++k) {
    const double t = static_cast<double>(k) / fine;
    c_tab[k] = oracle::mittag_leffler(2.0 * r, 1.0, -std::pow(t, 2.0 * r), 300);
    p_tab[k] = t == 0.0 ? 0.0
                        : std::pow(t, 2.0 * r - 1.0) *
                              oracle::mittag_leffler(2.0 * r, 2.0 * r,
                                                     -std::pow(t, 2.0 * r), 300);
  }
  std::vector<double> z(fine + 1), znext(fine + 1);
  for (int k = 0; k <= fine; ++k) z[k] = c_tab[k];
  for (int sweep = 0; sweep < 60; ++sweep) {
    double gap = 0.0;
    for (int i = 0; i <= fine; ++i) {
      double acc = c_tab[i];
      for (int j = 0; j < i; ++j) {
        acc += (1.0 / fine) * p_tab[i - j] * kappa * z[j];
      }
      znext[i] = acc;
      gap = std::max(gap, std::fabs(znext[i] - z[i]));
    }
    z.swap(znext);
    if (gap < 1e-14) break;
  }
  CHECK(solver_terminal == doctest::Approx(z[fine]).epsilon(1e-3));
}

TEST_CASE("contraction certificate arithmetic") {
  ScenarioSpec scn = bare_scenario(4);
  scn.constants.L_f1 = 0.0;
  scn.constants.L_f2 = 0.0;
  scn.constants.L_h = 0.0;
  scn.constants.growth.ell = 0.0;
  scn.constants.growth.w_hat = 0.0;

  const TimeGrid grid = TimeGrid::make(1.0, 64);
  auto fam = primed_families(scn, grid);
  const BoundConstants bc = bound_constants(*fam, 1.0);

  ContractionCertificate zero = contraction_certificate(scn, bc, 0.5);
  CHECK(zero.Lambda == 0.0);
  CHECK(zero.satisfied);

  // L_h = 1/28 with M1 = 1 gives Lambda = 1/2; the condition then reduces to
  // (6/delta) M3^2 M4^2 b < 1.
  scn.constants.L_h = 1.0 / 28.0;
  CHECK(bc.M1 == 1.0);
  ContractionCertificate half = contraction_certificate(scn, bc, 1.0);
  CHECK(half.Lambda == doctest::Approx(0.5).epsilon(1e-12));
  const double threshold = 6.0 * bc.M3 * bc.M3 * bc.M4 * bc.M4;  // b = 1
  ContractionCertificate good = contraction_certificate(scn, bc, threshold * 1.05);
  CHECK(good.satisfied);
  ContractionCertificate bad = contraction_certificate(scn, bc, threshold * 0.95);
  CHECK_FALSE(bad.satisfied);

  scn.constants.L_f1 = HypothesisConstants::unset;
  CHECK_THROWS_AS(contraction_certificate(scn, bc, 1.0), MissingConstant);
  CHECK_THROWS_AS(contraction_certificate(scn, bc, 0.0), ValidationError);
}

TEST_CASE("grid refinement of the deterministic part is first order") {
  auto terminal_at = [&](int steps) {
    ScenarioSpec scn = bare_scenario(3);
    SpectralVector phi0(3);
    phi0.c = {0.8, -0.2, 0.1};
    scn.phi = [phi0](double) { return phi0; };
    scn.xi.c = {0.1, 0.2, -0.1};
    scn.f1 = make_linear_map(0.05);
    scn.f2 = make_linear_map(0.3);
    scn.nu1 = make_lag_delay(1.0, 1.0);
    scn.nu2 = make_lag_delay(1.0, 1.0);
    ImpulseSpec imp;
    imp.point = 0.3;
    imp.state_jump = make_integral_jump(0.1);
    imp.velocity_jump = make_integral_jump(0.05);
    scn.impulses.push_back(imp);

    const TimeGrid grid = TimeGrid::make(1.0, steps, {0.3});
    auto fam = primed_families(scn, grid);
    const MildSolver solver(scn, grid, fam);
    SolverOptions opts;
    opts.tol = 1e-14;
    EnsembleResult res = picard_solve(solver, {}, opts, 1, 5);
    return res.terminals[0];
  };

  const SpectralVector t64 = terminal_at(64);
  const SpectralVector t128 = terminal_at(128);
  const SpectralVector t256 = terminal_at(256);
  const double e1 = std::sqrt(norm2(t128 - t64));
  const double e2 = std::sqrt(norm2(t256 - t128));
  CHECK(e2 / e1 > 0.3);
  CHECK(e2 / e1 < 0.7);
}

TEST_CASE("diverging iteration raises NotConverged with its report") {
  ScenarioSpec scn = bare_scenario(1);
  SpectralVector phi0(1, 1.0);
  scn.phi = [phi0](double) { return phi0; };
  scn.f2 = make_linear_map(40.0);  // far beyond contraction

  const TimeGrid grid = TimeGrid::make(1.0, 32);
  auto fam = primed_families(scn, grid);
  const MildSolver solver(scn, grid, fam);
  SolverOptions opts;
  opts.max_iter = 6;
  opts.relaxation = 1.0;  // plain iteration, no damping
  try {
    picard_solve(solver, {}, opts, 1, 5);
    FAIL("expected NotConverged");
  } catch (const NotConverged& e) {
    CHECK(e.report.iterations == 6);
    CHECK_FALSE(e.report.converged);
    CHECK(e.report.final_gap > opts.tol);
  }
}

TEST_CASE("zero-noise ensembles have zero variance and degenerate selections agree") {
  ScenarioSpec scn = bare_scenario(2);
  SpectralVector phi0(2);
  phi0.c = {0.5, 0.2};
  scn.phi = [phi0](double) { return phi0; };
  scn.f2 = make_linear_map(0.2);
  scn.inclusion = make_degenerate_inclusion(make_linear_map(0.1));
  scn.varrho = [](double t) { return t; };

  const TimeGrid grid = TimeGrid::make(1.0, 64);
  auto fam = primed_families(scn, grid);
  const MildSolver solver(scn, grid, fam);
  SolverOptions opts;

  EnsembleResult res = picard_solve(solver, {}, opts, 8, 5);
  for (int s = 1; s < 8; ++s) {
    CHECK(res.terminals[s].c == res.terminals[0].c);  // Q = 0: no spread at all
  }

  // With lower == upper every strategy yields bit-identical trajectories.
  EnsembleResult by_strategy[3];
  int idx = 0;
  for (SelectionKind kind :
       {SelectionKind::Lower, SelectionKind::Upper, SelectionKind::Random}) {
    SolverOptions o = opts;
    o.selection = SelectionStrategy{kind, 11};
    by_strategy[idx++] = picard_solve(solver, {}, o, 1, 5);
  }
  CHECK(by_strategy[0].terminals[0].c == by_strategy[1].terminals[0].c);
  CHECK(by_strategy[0].terminals[0].c == by_strategy[2].terminals[0].c);
}

TEST_CASE("ensemble results are identical across worker counts") {
  ScenarioSpec scn = bare_scenario(2);
  SpectralVector phi0(2);
  phi0.c = {0.5, 0.2};
  scn.phi = [phi0](double) { return phi0; };
  scn.f2 = make_linear_map(0.15);
  scn.inclusion = make_degenerate_inclusion(make_linear_map(0.2));
  scn.varrho = [](double t) { return 0.5 + t; };
  scn.noise.variances = {0.01, 0.005};

  const TimeGrid grid = TimeGrid::make(1.0, 48, {0.4});
  auto fam = primed_families(scn, grid);
  const MildSolver solver(scn, grid, fam);

  SolverOptions serial;
  serial.workers = 1;
  SolverOptions wide;
  wide.workers = 4;
  EnsembleResult a = picard_solve(solver, {}, serial, 12, 77, 3);
  EnsembleResult b = picard_solve(solver, {}, wide, 12, 77, 3);
  for (int s = 0; s < 12; ++s) CHECK(a.terminals[s].c == b.terminals[s].c);
  for (int s = 0; s < 3; ++s) {
    for (int k = 0; k < grid.num_nodes(); ++k) {
      CHECK(a.trajectories[s].states[k].c == b.trajectories[s].states[k].c);
    }
  }
  CHECK(a.report.final_gap == b.report.final_gap);
  CHECK(a.report.iterations == b.report.iterations);
}

TEST_SUITE_END();
