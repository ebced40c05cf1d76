#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "multipeak/ansatz.hpp"
#include "multipeak/errors.hpp"
#include "multipeak/quadrature.hpp"
#include "support.hpp"

using namespace multipeak;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using test_support::profile;

namespace {

constexpr double p = 2.7;

double distance(const Point& a, const Point& b) { return norm(a - b, Dimension::three()); }

}  // namespace

TEST_CASE("polygon vertices", "[ansatz]") {
  const double r = 2.3;
  const auto two = polygon_vertices(2, r, Dimension::two());
  CHECK_THAT(two[0][0], WithinAbs(-4.0 * r, 1e-12));
  CHECK_THAT(two[0][1], WithinAbs(0.0, 1e-12));
  CHECK_THAT(two[1][0], WithinAbs(-r, 1e-12));
  CHECK_THAT(distance(two[0], two[1]), WithinRel(3.0 * r, 1e-12));
  for (int K = 2; K <= 8; ++K) {
    for (int dim : {2, 3}) {
      const auto v = polygon_vertices(K, r, Dimension(dim));
      REQUIRE(static_cast<int>(v.size()) == K);
      CHECK_THAT(v.back()[0], WithinAbs(-r, 1e-12));
      CHECK_THAT(norm(v.back(), Dimension(dim)), WithinRel(r, 1e-12));
      for (int k = 0; k < K; ++k) {
        CHECK(v[k][2] == 0.0);
        CHECK_THAT(distance(v[k], v[(k + 1) % K]), WithinRel(3.0 * r, 1e-12));
      }
    }
  }
}

TEST_CASE("polygon separation invariants", "[ansatz][property]") {
  const double r = 1.7;
  for (int K = 2; K <= 8; ++K) {
    const auto v = polygon_vertices(K, r, Dimension::two());
    if (K >= 4) {
      double closest = 1e300;
      for (int a = 0; a < K; ++a)
        for (int b = a + 2; b < K; ++b)
          if (!(a == 0 && b == K - 1)) closest = std::min(closest, distance(v[a], v[b]));
      CHECK(closest >= ell(K) * r / 3.0 * (1.0 - 1e-12));
      CHECK(ell(K) > 3.0);
    }
    double nearest = 1e300;
    for (int k = 0; k + 1 < K; ++k) nearest = std::min(nearest, norm(v[k], Dimension::two()));
    const double angle = (K - 2) * pi / (2.0 * K);
    const double predicted = r * std::hypot(3.0 * std::sin(angle), 1.0 + 3.0 * std::cos(angle));
    CHECK_THAT(nearest, WithinRel(predicted, 1e-12));
    CHECK(nearest > 3.0 * r);
  }
}

TEST_CASE("sign pattern coefficients", "[ansatz]") {
  CHECK_THAT(chi(SignPattern({1, -1}), 2.5), WithinRel(0.3, 1e-15));
  for (double q : {2.3, 2.7, 3.0}) {
    const SignPattern four = SignPattern::alternating(4);
    CHECK(four.cyclic_sum() == -4);
    CHECK_THAT(chi(four, q), WithinRel(2.0 * (4.0 - q) / q, 1e-15));
  }
  try {
    SignPattern({1, 1, 1});
    FAIL("expected a validation error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::validation);
    CHECK(std::string(e.what()).find('3') != std::string::npos);
  }
}

TEST_CASE("sign condition over all patterns", "[ansatz][property]") {
  for (int K = 2; K <= 8; ++K) {
    for (int mask = 0; mask < (1 << K); ++mask) {
      std::vector<int> signs;
      for (int k = 0; k < K; ++k) signs.push_back(mask & (1 << k) ? 1 : -1);
      int sum = signs[K - 1] * signs[0];
      for (int k = 0; k + 1 < K; ++k) sum += signs[k] * signs[k + 1];
      if (sum < 0) {
        const SignPattern pattern(signs);
        REQUIRE(chi(pattern, p) > 0.0);
      } else {
        REQUIRE_THROWS_AS(SignPattern(signs), Error);
      }
    }
  }
}

TEST_CASE("building block charge and norm", "[ansatz]") {
  const auto phi = profile(2, p);
  const double eta = std::exp(6.0);
  const auto space = FieldSpace::create(GridSpec{Dimension::two(), 32.0, 256}, eta);
  const double r = 6.0;
  const EtaFunction block = building_block(eta, {-r, 0.0, 0.0}, *phi, space);
  CHECK_THAT(block.q(), WithinRel(phi->value(r) / space->beta_one(), 1e-15));
  const double expected =
      h1_norm_squared(*phi) + phi->value(r) * phi->value(r) / space->beta_one();
  CHECK_THAT(inner_product(block, block), WithinRel(expected, 1e-6));

  double previous = 1e300;
  for (double log_eta : {5.0, 7.0, 9.0, 11.0}) {
    const auto s = FieldSpace::create(GridSpec{Dimension::two(), 32.0, 64}, std::exp(log_eta));
    const double q = building_block(s->eta(), {-r, 0.0, 0.0}, *phi, s).q();
    CHECK_THAT(q * s->beta_one(), WithinRel(phi->value(r), 1e-14));
    CHECK(q < previous);
    previous = q;
  }
  try {
    (void)building_block(eta, {-25.0, 0.0, 0.0}, *phi, space);
    FAIL("expected a geometry error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::geometry);
  }
}

TEST_CASE("two-peak pseudo-critical point", "[ansatz]") {
  const auto phi = profile(2, p);
  const double eta = std::exp(6.0);
  const auto space = FieldSpace::create(GridSpec{Dimension::two(), 64.0, 512}, eta);
  const double r = 8.0;
  const PeakConfiguration config{Dimension::two(), p, eta, r, SignPattern::alternating(2)};
  const PeakField field(config, *phi, space);
  const EtaFunction W = field.superposition();
  CHECK_THAT(std::abs(W.q()),
             WithinRel((phi->value(r) - phi->value(4.0 * r)) / space->beta_one(), 1e-14));
  const auto [lo, hi] = std::minmax_element(W.phi().begin(), W.phi().end());
  CHECK(*lo < 0.0);
  CHECK(*hi > 0.0);

  // ||W||^2 assembled from pairwise data: <Phi_a | Phi_b>_{H^1} = I(|a - b|)
  const double vertex = phi->value(4.0 * r) - phi->value(r);
  const double assembled = 2.0 * h1_norm_squared(*phi) -
                           2.0 * interaction_integral(*phi, 3.0 * r) +
                           vertex * vertex / space->beta_one();
  CHECK_THAT(inner_product(W, W), WithinRel(assembled, 1e-8));
  const auto again = pseudo_critical(config, *phi, space);
  CHECK(norm(again - W) <= 1e-14 * norm(W));
}

TEST_CASE("admissible interval", "[ansatz]") {
  const auto phi = profile(2, p);
  const SignPattern pattern = SignPattern::alternating(2);
  const double c = 8.0 * chi(pattern, p);
  double previous_gap = 1e300, previous_min = 0.0, previous_max = 0.0;
  for (double log_eta = 4.0; log_eta <= 9.0; log_eta += 1.0) {
    const double eta = std::exp(log_eta);
    const AdmissibleInterval interval = admissible_interval(eta, c, chi(pattern, p), *phi);
    REQUIRE(interval.r_min < interval.r_max);
    for (int i = 1; i <= 10; ++i) {
      const double r = interval.r_min + (interval.r_max - interval.r_min) * i / 11.0;
      const double ratio = admissibility_ratio(*phi, r);
      CHECK(ratio > eta / log_eta);
      CHECK(ratio < c * eta);
    }
    const double mid = interval.r_mid() / log_eta;
    INFO("log eta = " << log_eta << ", r_mid / log eta = " << mid);
    CHECK(mid >= 0.6);
    CHECK(mid <= 1.4);
    CHECK(std::abs(mid - 1.0) < previous_gap);
    previous_gap = std::abs(mid - 1.0);
    CHECK(interval.r_min > previous_min);
    CHECK(interval.r_max > previous_max);
    previous_min = interval.r_min;
    previous_max = interval.r_max;
  }
}

TEST_CASE("admissible interval is monotone in eta", "[ansatz][property]") {
  const auto phi = profile(2, p);
  const SignPattern pattern = SignPattern::alternating(2);
  const double c = 8.0 * pair_coupling(pattern);
  const auto a = admissible_interval(300.0, c, chi(pattern, p), *phi);
  const auto b = admissible_interval(600.0, c, chi(pattern, p), *phi);
  const auto d = admissible_interval(1200.0, c, chi(pattern, p), *phi);
  CHECK(a.r_min < b.r_min);
  CHECK(b.r_min < d.r_min);
  CHECK(a.r_max < b.r_max);
  CHECK(b.r_max < d.r_max);
}

TEST_CASE("admissible interval preconditions", "[ansatz][errors]") {
  const auto phi = profile(2, p);
  const SignPattern pattern = SignPattern::alternating(2);
  CHECK_THROWS_AS(admissible_interval(2.0, 8.0, chi(pattern, p), *phi), Error);
  try {
    (void)admissible_interval(400.0, 3.0 * chi(pattern, p), chi(pattern, p), *phi);
    FAIL("expected a validation error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::validation);
  }
  try {
    (void)admissible_interval(std::exp(40.0), 8.0, chi(pattern, p), *phi);
    FAIL("expected a range error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::range);
  }
}

TEST_CASE("pseudo-critical residual follows its predicted scale", "[ansatz]") {
  const auto phi = profile(2, p);
  const SignPattern pattern = SignPattern::alternating(2);
  std::vector<double> ratios, log_beta, log_q;
  for (double log_eta = 4.0; log_eta <= 8.0; log_eta += 1.0) {
    const double eta = std::exp(log_eta);
    const auto interval = admissible_interval(eta, 8.0 * chi(pattern, p), chi(pattern, p), *phi);
    const double r = interval.r_mid();
    const auto space = FieldSpace::create(GridSpec{Dimension::two(), 64.0, 512}, eta);
    const PeakField field(PeakConfiguration{Dimension::two(), p, eta, r, pattern}, *phi, space);
    ratios.push_back(field.residual_norm() / residual_scale(Dimension::two(), p, r, eta));
  }
  INFO("ratios " << ratios[0] << " " << ratios[1] << " " << ratios[2] << " " << ratios[3] << " "
                 << ratios[4]);
  const double first = ratios.front();
  for (double ratio : ratios) CHECK(ratio <= 1.5 * first);

  const double r = 8.0;
  for (double log_eta = 5.0; log_eta <= 9.0; log_eta += 1.0) {
    const auto space = FieldSpace::create(GridSpec{Dimension::two(), 64.0, 512}, std::exp(log_eta));
    const PeakField field(PeakConfiguration{Dimension::two(), p, space->eta(), r, pattern}, *phi,
                          space);
    log_beta.push_back(std::log(space->beta_one()));
    log_q.push_back(std::log(std::abs(field.gradient(EtaFunction::zero(space)).q())));
  }
  CHECK_THAT(fit_line(log_beta, log_q).slope, WithinAbs(-2.0, 0.1));
}

TEST_CASE("single distant peak has a small residual", "[ansatz]") {
  const auto phi = profile(2, p);
  const double eta = std::exp(10.0);
  const auto space = FieldSpace::create(GridSpec{Dimension::two(), 64.0, 512}, eta);
  const EtaFunction block = building_block(eta, {-20.0, 0.0, 0.0}, *phi, space);
  CHECK(residual_norm(block, p) < 1e-2);
}
