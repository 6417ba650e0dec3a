#include <doctest.h>

#include <cmath>

#include "fsic/special_functions.hpp"
#include "oracle_helpers.hpp"

using namespace fsic;

TEST_SUITE_BEGIN("special_functions");

TEST_CASE("wright_chi at z = 0 reduces to 1/Gamma(1 - rho)") {
  CHECK(wright_chi(0.5, 0.0) == doctest::Approx(oracle::ref::inv_sqrt_pi).epsilon(1e-12));
  CHECK(wright_chi(2.0 / 3.0, 0.0) ==
        doctest::Approx(oracle::ref::inv_gamma_one_third).epsilon(1e-12));
  CHECK(wright_chi(2.0 / 3.0, 0.0) ==
        doctest::Approx(1.0 / std::tgamma(1.0 / 3.0)).epsilon(1e-12));
}

TEST_CASE("wright_chi matches the closed form exp(-z^2/4)/sqrt(pi) at rho = 1/2") {
  for (double z = 0.0; z <= 4.0; z += 0.25) {
    const double closed = std::exp(-z * z / 4.0) * oracle::ref::inv_sqrt_pi;
    CHECK(wright_chi(0.5, z) == doctest::Approx(closed).epsilon(1e-10));
    CHECK(wright_chi(0.5, z) == doctest::Approx(oracle::wright_chi(0.5, z)).epsilon(1e-10));
  }
}

TEST_CASE("wright_chi frozen reference values") {
  // The truncation contract is remainder < abs_tol (1e-10 by default).
  CHECK(wright_chi(2.0 / 3.0, 0.5) == doctest::Approx(oracle::ref::chi_23_05).epsilon(1e-9));
  CHECK(wright_chi(2.0 / 3.0, 1.0) == doctest::Approx(oracle::ref::chi_23_1).epsilon(1e-9));
  CHECK(wright_chi(0.55, 2.0) == doctest::Approx(oracle::ref::chi_055_2).epsilon(1e-9));
  CHECK(wright_chi(0.9, 1.5) == doctest::Approx(oracle::ref::chi_09_15).epsilon(1e-9));
}

TEST_CASE("wright_chi stays nonnegative on the density domain") {
  // Tolerance at the truncation scale: near the support edge the true values
  // sit below abs_tol, so roundoff-level negatives are acceptable.
  SeriesControl ctl;
  ctl.max_terms = 512;
  for (double rho : {0.55, 2.0 / 3.0, 0.9}) {
    for (double z = 0.0; z <= 6.0; z += 0.1) {
      if (rho > 0.8 && z > 1.8) break;  // beyond the density's support
      CHECK(wright_chi(rho, z, ctl) >= -1e-10);
    }
  }
}

TEST_CASE("wright_chi flags non-convergence for arguments beyond the series range") {
  CHECK_THROWS_AS(wright_chi(0.55, 1.0e6), NonConvergent);
  SeriesControl tight;
  tight.max_terms = 8;
  CHECK_THROWS_AS(wright_chi(0.5, 20.0, tight), NonConvergent);
  const SeriesResult res = wright_chi_checked(0.55, 1.0e6);
  CHECK_FALSE(res.converged);
}

TEST_CASE("mittag_leffler reduces to exp at alpha = beta = 1") {
  CHECK(mittag_leffler(1.0, 1.0, 1.0) == doctest::Approx(std::exp(1.0)).epsilon(1e-12));
  for (double z = -5.0; z <= 5.0; z += 0.5) {
    CHECK(mittag_leffler(1.0, 1.0, z) == doctest::Approx(std::exp(z)).epsilon(1e-10));
  }
}

TEST_CASE("mittag_leffler reduces to cos at alpha = 2") {
  const double half_pi = 1.5707963267948966;
  CHECK(std::fabs(mittag_leffler(2.0, 1.0, -half_pi * half_pi)) <= 1e-8);
  CHECK(mittag_leffler(2.0, 1.0, -1.0) == doctest::Approx(std::cos(1.0)).epsilon(1e-12));
}

TEST_CASE("mittag_leffler agrees with the brute-force series oracle") {
  CHECK(mittag_leffler(4.0 / 3.0, 1.0, -1.0) ==
        doctest::Approx(oracle::mittag_leffler(4.0 / 3.0, 1.0, -1.0)).epsilon(1e-12));
  CHECK(mittag_leffler(4.0 / 3.0, 1.0, -1.0) ==
        doctest::Approx(oracle::ref::e_43_m1).epsilon(1e-12));
  CHECK(mittag_leffler(4.0 / 3.0, 4.0 / 3.0, -1.0) ==
        doctest::Approx(oracle::ref::e_4343_m1).epsilon(1e-12));
  CHECK(mittag_leffler(4.0 / 3.0, 2.0, -1.0) ==
        doctest::Approx(oracle::ref::e_432_m1).epsilon(1e-12));
}

TEST_CASE("mittag_leffler survives heavy cancellation inside the declared range") {
  // At z = -100, alpha = 1.1 roughly 27 decimal digits cancel; the quad-
  // precision pass certifies a few 1e-6 absolute, so the guard needs the
  // matching tolerance.
  SeriesControl ctl;
  ctl.max_terms = 512;
  ctl.abs_tol = 4e-6;
  CHECK(mittag_leffler(1.1, 1.0, -100.0, ctl) ==
        doctest::Approx(oracle::ref::e_11_m100).epsilon(0.004));
  CHECK(mittag_leffler(1.8, 1.0, -100.0, ctl) ==
        doctest::Approx(oracle::ref::e_18_m100).epsilon(1e-9));
  CHECK_THROWS_AS(mittag_leffler(1.1, 1.0, -1.0e6, ctl), NonConvergent);
}

TEST_CASE("series control validation") {
  SeriesControl bad;
  bad.abs_tol = 0.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = SeriesControl{};
  bad.max_terms = 4;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  CHECK_THROWS_AS(mittag_leffler(0.0, 1.0, 0.0), ValidationError);
  CHECK_THROWS_AS(wright_chi(1.2, 0.0), ValidationError);
  CHECK_THROWS_AS(wright_chi(0.5, -1.0), ValidationError);
}

TEST_CASE("gauss_legendre integrates polynomials exactly") {
  std::vector<double> nodes, weights;
  gauss_legendre(8, nodes, weights);
  double integral = 0.0;
  double mass = 0.0;
  for (int i = 0; i < 8; ++i) {
    integral += weights[i] * std::pow(nodes[i], 6);
    mass += weights[i];
    CHECK(nodes[i] == doctest::Approx(-nodes[7 - i]).epsilon(1e-14));
  }
  CHECK(integral == doctest::Approx(2.0 / 7.0).epsilon(1e-13));
  CHECK(mass == doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("subordination plan integrates the Mainardi density to one") {
  for (double r : {0.55, 2.0 / 3.0, 0.9}) {
    const double mass = subordinate(r, [](double) { return 1.0; });
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("subordinate(r, 1) = 1 across a grid of r") {
  for (double r = 0.55; r <= 0.951; r += 0.05) {
    const double mass = subordinate(r, [](double) { return 1.0; });
    CHECK(mass == doctest::Approx(1.0).epsilon(2e-7));
  }
}

TEST_CASE("subordination first moment matches 1/Gamma(1+r)") {
  for (double r : {0.55, 2.0 / 3.0, 0.9}) {
    const double m1 = subordinate(r, [](double theta) { return theta; });
    CHECK(m1 == doctest::Approx(1.0 / std::tgamma(1.0 + r)).epsilon(1e-8));
  }
}

TEST_CASE("subordination quadrature equals the Mittag-Leffler series per mode") {
  // cos-kernel route at x = 1, n = 1, r = 2/3 against E_{4/3}(-1).
  const double r = 2.0 / 3.0;
  const double value = subordinate(r, [](double theta) { return std::cos(theta); });
  CHECK(value == doctest::Approx(oracle::ref::e_43_m1).epsilon(1e-5));
  // At x = 0 the integrand collapses to the density mass.
  const double at_zero = subordinate(r, [](double) { return 1.0; });
  CHECK(at_zero == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_SUITE_END();
