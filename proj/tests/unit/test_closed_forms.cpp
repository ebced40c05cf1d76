#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "multipeak/closed_forms.hpp"
#include "multipeak/errors.hpp"
#include "multipeak/quadrature.hpp"
#include "oracle_values.hpp"

using namespace multipeak;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

/// K_nu(t) = int_0^inf exp(-t cosh s) cosh(nu s) ds, truncated where the
/// integrand is below 1e-300.
double bessel_integral(double nu, double t) {
  const double end = std::acosh(700.0 / t + 1.0);
  return composite_gauss([&](double s) { return std::exp(-t * std::cosh(s)) * std::cosh(nu * s); },
                         0.0, end, 400, 10);
}

}  // namespace

TEST_CASE("bessel_k of order one half is elementary", "[closed_forms]") {
  for (double t : {0.5, 1.0, 5.0})
    CHECK_THAT(bessel_k(0.5, t), WithinRel(std::sqrt(pi / (2.0 * t)) * std::exp(-t), 1e-14));
  for (double t = 0.1; t <= 50.0; t += 0.1) {
    const double exact = std::sqrt(pi / (2.0 * t)) * std::exp(-t);
    REQUIRE(std::abs(bessel_k(0.5, t) - exact) < 1e-12 * bessel_k(0.5, t));
  }
}

TEST_CASE("bessel_k agrees with the integral representation", "[closed_forms]") {
  CHECK_THAT(bessel_k(0.0, 1.0), WithinRel(bessel_integral(0.0, 1.0), 1e-10));
  CHECK_THAT(bessel_k(1.0, 1.0), WithinRel(bessel_integral(1.0, 1.0), 1e-10));
  CHECK_THAT(bessel_k(0.0, 1.0), WithinRel(oracle::bessel_k0_1, 1e-12));
  CHECK_THAT(bessel_k(1.0, 1.0), WithinRel(oracle::bessel_k1_1, 1e-12));
  CHECK_THAT(bessel_k(0.0, 0.01), WithinRel(oracle::bessel_k0_0p01, 1e-12));
  for (double t : {0.2, 2.0, 7.5, 20.0, 24.9, 25.1, 40.0})
    CHECK_THAT(scaled_bessel_k(0.0, t), WithinRel(std::exp(t) * bessel_integral(0.0, t), 1e-10));
}

TEST_CASE("K_0 approaches its asymptotic form", "[closed_forms]") {
  const double ratio = scaled_bessel_k(0.0, 50.0) * std::sqrt(2.0 * 50.0 / pi);
  CHECK(std::abs(ratio - 1.0) < 0.05);
  CHECK_THAT(ratio, WithinRel(oracle::scaled_k0_50_ratio, 1e-12));
}

TEST_CASE("bessel_k rejects non-positive arguments", "[closed_forms][errors]") {
  for (double t : {0.0, -1.0}) {
    try {
      (void)bessel_k(0.0, t);
      FAIL("expected a domain error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::domain);
    }
  }
}

TEST_CASE("Green's function closed forms", "[closed_forms]") {
  const GreensEvaluator g3(1.0, Dimension::three());
  CHECK_THAT(g3({1.0, 0.0, 0.0}), WithinRel(std::exp(-1.0) / (4.0 * pi), 1e-15));
  const GreensEvaluator g4(4.0, Dimension::three());
  for (double s : {0.3, 1.0, 2.5}) {
    CHECK_THAT(g4.radial(s), WithinRel(std::exp(-2.0 * s) / (4.0 * pi * s), 1e-14));
    CHECK_THAT(g4.radial(s), WithinRel(2.0 * g3.radial(2.0 * s), 1e-14));
  }
  const GreensEvaluator g2(1.0, Dimension::two());
  CHECK_THAT(g2.radial(1.0), WithinRel(oracle::bessel_k0_1 / (2.0 * pi), 1e-12));
}

TEST_CASE("Green's function is radial", "[closed_forms][property]") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * pi), radius(0.05, 30.0), lam(0.1, 9.0);
  for (int dim : {2, 3}) {
    const Dimension d(dim);
    for (int i = 0; i < 200; ++i) {
      const GreensEvaluator g(lam(rng), d);
      const double s = radius(rng), a = angle(rng), b = angle(rng);
      const Point x = dim == 2 ? Point{s * std::cos(a), s * std::sin(a), 0.0}
                               : Point{s * std::sin(b) * std::cos(a), s * std::sin(b) * std::sin(a),
                                       s * std::cos(b)};
      REQUIRE_THAT(g(x), WithinRel(g.radial(s), 1e-12));
    }
  }
}

TEST_CASE("Green's function satisfies the weak identity", "[closed_forms]") {
  // psi(s) = (1 - s^2)^6 on the unit ball; (-Delta + lambda) psi is explicit.
  auto psi = [](double s) { return std::pow(1.0 - s * s, 6); };
  auto psi1 = [](double s) { return -12.0 * s * std::pow(1.0 - s * s, 5); };
  auto psi2 = [](double s) {
    return -12.0 * std::pow(1.0 - s * s, 5) + 120.0 * s * s * std::pow(1.0 - s * s, 4);
  };
  for (int dim : {2, 3}) {
    for (double lambda : {1.0, 4.0, 0.3}) {
      const GreensEvaluator g(lambda, Dimension(dim));
      // s = t^2 smooths the logarithmic singularity in two dimensions
      const double value = composite_gauss(
          [&](double t) {
            const double s = t * t;
            const double op = -psi2(s) - (dim - 1) / s * psi1(s) + lambda * psi(s);
            return 2.0 * t * g.radial(s) * op * unit_sphere_area(Dimension(dim)) *
                   std::pow(s, dim - 1);
          },
          0.0, 1.0, 200, 10);
      CHECK_THAT(value, WithinAbs(psi(0.0), 1e-6));
    }
  }
}

TEST_CASE("Green's function domain errors", "[closed_forms][errors]") {
  try {
    (void)GreensEvaluator(1.0, Dimension::two())({0.0, 0.0, 0.0});
    FAIL("expected a singularity error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::singularity);
  }
  try {
    (void)GreensEvaluator(0.0, Dimension::three());
    FAIL("expected a domain error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::domain);
  }
  CHECK_THROWS_AS(Dimension(4), Error);
}

TEST_CASE("beta examples", "[closed_forms]") {
  CHECK_THAT(beta({0.0, Dimension::three()}, 1.0), WithinRel(1.0 / (4.0 * pi), 1e-15));
  for (double alpha : {-1.0, 0.0, 2.5})
    CHECK_THAT(beta({alpha, Dimension::two()}, 1.0),
               WithinAbs(alpha + (euler_gamma - std::log(2.0)) / (2.0 * pi), 1e-15));
  CHECK_THAT(beta({1.0, Dimension::three()}, 16.0), WithinRel(1.0 + 1.0 / pi, 1e-15));
  CHECK_THROWS_AS(beta({0.0, Dimension::two()}, 0.0), Error);
}

TEST_CASE("beta is affine in log sqrt(lambda) and sqrt(lambda)", "[closed_forms][property]") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> a(-5.0, 5.0), l(0.01, 100.0);
  for (int i = 0; i < 1000; ++i) {
    const double alpha = a(rng), l1 = l(rng), l2 = l(rng), l3 = l(rng);
    for (int dim : {2, 3}) {
      const CouplingParams c{alpha, Dimension(dim)};
      auto x = [&](double lam) {
        return dim == 2 ? std::log(std::sqrt(lam)) : std::sqrt(lam);
      };
      // three points on one line: the divided differences agree
      const double s12 = (beta(c, l2) - beta(c, l1)) / (x(l2) - x(l1));
      const double s13 = (beta(c, l3) - beta(c, l1)) / (x(l3) - x(l1));
      const double slope = dim == 2 ? 1.0 / (2.0 * pi) : 1.0 / (4.0 * pi);
      REQUIRE_THAT(s12, WithinRel(slope, 1e-9));
      REQUIRE_THAT(s13, WithinRel(slope, 1e-9));
    }
  }
}

TEST_CASE("bound state energies", "[closed_forms]") {
  const auto e3 = bound_state_energy({-1.0 / (4.0 * pi), Dimension::three()});
  REQUIRE(e3.has_value());
  CHECK_THAT(*e3, WithinRel(-1.0, 1e-14));
  CHECK_FALSE(bound_state_energy({0.3, Dimension::three()}).has_value());
  const double alpha = (std::log(4.0) - 2.0 * euler_gamma) / (4.0 * pi);
  const auto e2 = bound_state_energy({alpha, Dimension::two()});
  REQUIRE(e2.has_value());
  CHECK_THAT(*e2, WithinRel(-1.0, 1e-14));
}

TEST_CASE("p_* threshold", "[closed_forms]") {
  CHECK(p_star() > 2.45);
  CHECK(p_star() < 2.46);
  CHECK_THAT(p_star(), WithinRel((9.0 + std::sqrt(113.0)) / 8.0, 1e-15));
  CHECK(p_star_threshold(3.0));
  CHECK_FALSE(p_star_threshold(2.2));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> p(2.0, 3.0);
  for (int i = 0; i < 10000; ++i) {
    double x = p(rng);
    if (x == 2.0) x = 3.0;
    REQUIRE(p_star_threshold(x) == (x > p_star()));
  }
  for (double bad : {2.0, 1.5, 3.0001}) CHECK_THROWS_AS(p_star_threshold(bad), Error);
}

TEST_CASE("geometric constants", "[closed_forms]") {
  for (int K = 2; K <= 8; ++K) {
    const double angle = 4.0 * pi / K;
    CHECK_THAT(ell(K), WithinAbs(3.0 * std::hypot(std::cos(angle) - 1.0, std::sin(angle)), 1e-14));
  }
  CHECK_THAT(green_far_field_prefactor(Dimension::two()),
             WithinRel(std::pow(2.0, -1.5) / std::sqrt(pi), 1e-15));
  CHECK_THAT(green_far_field_prefactor(Dimension::two()),
             WithinRel(std::sqrt(pi / 2.0) / (2.0 * pi), 1e-15));
  CHECK_THAT(green_far_field_prefactor(Dimension::three()), WithinRel(1.0 / (4.0 * pi), 1e-15));
  CHECK_THAT(unit_sphere_area(Dimension::two()), WithinRel(2.0 * pi, 1e-15));
  CHECK_THAT(unit_sphere_area(Dimension::three()), WithinRel(4.0 * pi, 1e-15));
}
