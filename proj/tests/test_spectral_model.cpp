#include <doctest.h>

#include <cmath>
#include <random>

#include "fsic/spectral_model.hpp"
#include "fsic/stochastic.hpp"
#include "oracle_helpers.hpp"

using namespace fsic;

TEST_SUITE_BEGIN("spectral_model");

TEST_CASE("dirichlet spectrum") {
  const SpectralSpace space = SpectralSpace::dirichlet(4);
  CHECK(space.eigenvalues == std::vector<double>{-1.0, -4.0, -9.0, -16.0});
  for (std::size_t i = 1; i < space.eigenvalues.size(); ++i) {
    CHECK(space.eigenvalues[i] < space.eigenvalues[i - 1]);
  }
}

TEST_CASE("cosine family on eigenvectors") {
  SpectralVector v(3);
  v.c = {0.3, -0.7, 1.1};
  const SpectralVector id = cosine_apply(0.0, v);
  for (int m = 0; m < 3; ++m) CHECK(id.c[m] == v.c[m]);

  const double pi = 3.14159265358979323846;
  const SpectralVector e1 = SpectralVector::unit(3, 0);
  CHECK(cosine_apply(pi, e1).c[0] == doctest::Approx(-1.0).epsilon(1e-14));
  const SpectralVector e2 = SpectralVector::unit(3, 1);
  CHECK(cosine_apply(pi / 2.0, e2).c[1] == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("sine family on eigenvectors") {
  SpectralVector v(2);
  v.c = {1.0, 1.0};
  const SpectralVector zero = sine_apply(0.0, v);
  CHECK(norm2(zero) == 0.0);

  const double pi = 3.14159265358979323846;
  const SpectralVector e1 = SpectralVector::unit(2, 0);
  CHECK(sine_apply(pi / 2.0, e1).c[0] == doctest::Approx(1.0).epsilon(1e-14));
  const SpectralVector e2 = SpectralVector::unit(2, 1);
  CHECK(std::fabs(sine_apply(pi / 2.0, e2).c[1]) <= 1e-12);
}

TEST_CASE("fractional family values against the series oracle") {
  FractionalFamilies fam(2.0 / 3.0, 5);
  CHECK(fam.c_exact(0, 1.0) == doctest::Approx(oracle::ref::c_1_1).epsilon(1e-11));
  CHECK(fam.s_exact(0, 1.0) == doctest::Approx(oracle::ref::s_1_1).epsilon(1e-11));
  CHECK(fam.p_exact(0, 1.0) == doctest::Approx(oracle::ref::p_1_1).epsilon(1e-11));
  CHECK(fam.c_exact(2, 0.5) == doctest::Approx(oracle::ref::c_3_05).epsilon(1e-11));
  CHECK(fam.s_exact(2, 0.5) == doctest::Approx(oracle::ref::s_3_05).epsilon(1e-11));
  CHECK(fam.p_exact(2, 0.5) == doctest::Approx(oracle::ref::p_3_05).epsilon(1e-11));
  CHECK(fam.c_exact(4, 0.25) == doctest::Approx(oracle::ref::c_5_025).epsilon(1e-11));
  CHECK(fam.s_exact(4, 0.25) == doctest::Approx(oracle::ref::s_5_025).epsilon(1e-11));
  CHECK(fam.p_exact(4, 0.25) == doctest::Approx(oracle::ref::p_5_025).epsilon(1e-11));
  CHECK(fam.c_exact(1, 0.8) == doctest::Approx(oracle::ref::c_2_08).epsilon(1e-11));
  CHECK(fam.s_exact(1, 0.8) == doctest::Approx(oracle::ref::s_2_08).epsilon(1e-11));
  CHECK(fam.p_exact(1, 0.8) == doctest::Approx(oracle::ref::p_2_08).epsilon(1e-11));
}

TEST_CASE("frac_family_eval basics") {
  FractionalFamilies fam(2.0 / 3.0, 4);
  SpectralVector v(4);
  v.c = {1.0, -0.5, 0.25, 2.0};

  const SpectralVector at_zero = frac_family_eval(fam, Family::Cr, 0.0, v);
  for (int m = 0; m < 4; ++m) CHECK(at_zero.c[m] == v.c[m]);  // C_r(0) = I

  const SpectralVector s_zero = frac_family_eval(fam, Family::Sr, 0.0, v);
  CHECK(norm2(s_zero) == 0.0);
  const SpectralVector p_zero = frac_family_eval(fam, Family::Pr, 0.0, v);
  CHECK(norm2(p_zero) == 0.0);

  const SpectralVector e1 = SpectralVector::unit(4, 0);
  const SpectralVector c1 = frac_family_eval(fam, Family::Cr, 1.0, e1);
  CHECK(c1.c[0] == doctest::Approx(oracle::ref::e_43_m1).epsilon(1e-10));

  SpectralVector wrong(3);
  CHECK_THROWS_AS(frac_family_eval(fam, Family::Cr, 0.5, wrong), DimensionMismatch);
}

TEST_CASE("subordination route agrees with the Mittag-Leffler route") {
  for (double r : {0.55, 2.0 / 3.0, 0.9}) {
    FractionalFamilies fam(r, 6);
    for (int mode : {0, 2, 5}) {
      for (double x : {0.15, 0.5, 1.0}) {
        const double via_series = fam.c_exact(mode, x);
        const double via_quadrature = fam.c_subordination(mode, x);
        CHECK(via_quadrature == doctest::Approx(via_series).epsilon(2e-6).scale(1.0));
        const double p_series = fam.p_exact(mode, x);
        const double p_quadrature = fam.p_subordination(mode, x);
        CHECK(p_quadrature == doctest::Approx(p_series).epsilon(2e-6).scale(1.0));
      }
    }
  }
}

TEST_CASE("family consistency: s_n is the running integral of c_n") {
  FractionalFamilies fam(2.0 / 3.0, 3);
  const int fine = 2048;
  for (int mode : {0, 2}) {
    double acc = 0.0;
    double prev = fam.c_exact(mode, 0.0);
    for (int k = 1; k <= fine; ++k) {
      const double x = static_cast<double>(k) / fine;
      const double cur = fam.c_exact(mode, x);
      acc += 0.5 * (prev + cur) / fine;
      prev = cur;
      if (k % 512 == 0) {
        CHECK(fam.s_exact(mode, x) == doctest::Approx(acc).epsilon(1e-6).scale(1.0));
      }
    }
  }
}

TEST_CASE("mode evolution matches the Caputo oracle identity") {
  // c_n solves D^{2r} c = -n^2 c with c(0) = 1, c'(0) = 0; per mode that is
  // exactly E_{2r}(-n^2 x^{2r}), checked against the independent series.
  const double r = 0.7;
  FractionalFamilies fam(r, 4);
  for (int mode = 0; mode < 4; ++mode) {
    const double n2 = (mode + 1.0) * (mode + 1.0);
    for (double x : {0.1, 0.35, 0.75, 1.0}) {
      const double expected =
          oracle::mittag_leffler(2.0 * r, 1.0, -n2 * std::pow(x, 2.0 * r), 300);
      CHECK(fam.c_exact(mode, x) == doctest::Approx(expected).epsilon(1e-9));
    }
  }
}

TEST_CASE("boundary sanity: c_1 approaches cos(x) as r -> 1") {
  FractionalFamilies fam(0.999, 1);
  for (double x = 0.0; x <= 1.0; x += 0.05) {
    CHECK(fam.c_exact(0, x) == doctest::Approx(std::cos(x)).epsilon(5e-3).scale(1.0));
  }
}

TEST_CASE("grid cache returns exact values at primed offsets") {
  const TimeGrid grid = TimeGrid::make(1.0, 64, {0.3});
  FractionalFamilies fam(2.0 / 3.0, 4);
  fam.prime_grid(grid);
  CHECK(fam.primed());
  // Uniform offsets and impulse offsets resolve to exact series values.
  for (double t : {0.0, 1.0 / 64.0, 0.5, 0.3, 0.3 - 1.0 / 64.0, 1.0 - 0.3, 1.0}) {
    for (int m = 0; m < 4; ++m) {
      CHECK(fam.c(m, t) == doctest::Approx(fam.c_exact(m, t)).epsilon(1e-13));
      CHECK(fam.s(m, t) == doctest::Approx(fam.s_exact(m, t)).epsilon(1e-13));
      CHECK(fam.p(m, t) == doctest::Approx(fam.p_exact(m, t)).epsilon(1e-13));
    }
  }
  // Off-cache arguments interpolate between uniform nodes.
  const double mid = 0.5 + 0.3 / 64.0;
  CHECK(fam.c(0, mid) == doctest::Approx(fam.c_exact(0, mid)).epsilon(1e-4));
}

TEST_CASE("bound constants follow the envelope formulas") {
  const TimeGrid grid = TimeGrid::make(1.0, 128);
  FractionalFamilies fam(2.0 / 3.0, 4);
  fam.prime_grid(grid);
  const BoundConstants bc = bound_constants(fam, 1.0);
  CHECK(bc.M1 >= 1.0);
  CHECK(bc.M2 == doctest::Approx(bc.M1 * 1.0).epsilon(1e-14));
  CHECK(bc.M3 ==
        doctest::Approx(bc.M1 / oracle::ref::gamma_four_thirds).epsilon(1e-12));
  CHECK(bc.M4 == 5.0);
}

TEST_CASE("control operator block and adjoint identity") {
  SpectralVector u(4);
  u.c = {0.0, 1.0, 0.0, 0.0};
  const SpectralVector bu = b_apply(u);
  CHECK(bu.c == std::vector<double>{2.0, 1.0, 0.0, 0.0});

  const SpectralVector bstar_e1 = b_star_apply(SpectralVector::unit(4, 0));
  CHECK(bstar_e1.c == std::vector<double>{0.0, 2.0, 0.0, 0.0});

  SpectralVector zero(4);
  CHECK(norm2(b_apply(zero)) == 0.0);

  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    SpectralVector uu(6), vv(6);
    for (int m = 0; m < 6; ++m) {
      uu.c[m] = dist(rng);
      vv.c[m] = dist(rng);
    }
    uu.c[0] = 0.0;  // control space has no first channel
    CHECK(std::fabs(dot(b_apply(uu), vv) - dot(uu, b_star_apply(vv))) <= 1e-12);
  }
}

TEST_CASE("|B|^2 equals the brute-force largest eigenvalue of B B*") {
  const int n = 8;
  // Assemble B B* densely: columns are B B* applied to basis vectors.
  std::vector<double> m(n * n, 0.0);
  for (int j = 0; j < n; ++j) {
    const SpectralVector col = b_apply(b_star_apply(SpectralVector::unit(n, j)));
    for (int i = 0; i < n; ++i) m[i * n + j] = col.c[i];
  }
  const double top = oracle::largest_eigenvalue(m, n);
  CHECK(b_norm_squared(n) == doctest::Approx(top).epsilon(1e-10));
  CHECK(b_norm_squared(n) == 5.0);
}

TEST_SUITE_END();
