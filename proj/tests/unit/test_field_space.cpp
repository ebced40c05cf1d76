#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <random>

#include <Eigen/Dense>

#include "multipeak/errors.hpp"
#include "multipeak/field_space.hpp"
#include "multipeak/quadrature.hpp"
#include "support.hpp"

using namespace multipeak;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using test_support::profile;
using test_support::random_field;

namespace {

constexpr double p = 2.7;

std::shared_ptr<const FieldSpace> space2() {
  static auto space = FieldSpace::create(GridSpec{Dimension::two(), 32.0, 256}, std::exp(6.0));
  return space;
}

EtaFunction ground(const std::shared_ptr<const FieldSpace>& space) {
  const auto phi = profile(2, p);
  return EtaFunction(space, space->sample_radial({0, 0, 0}, [&](double s) { return phi->value(s); }),
                     0.0);
}

EtaFunction random_function(const std::shared_ptr<const FieldSpace>& space, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> q(-1.0, 1.0);
  return EtaFunction(space, random_field(*space, rng), q(rng));
}

}  // namespace

TEST_CASE("energy inner product", "[field_space]") {
  const auto space = space2();
  std::mt19937_64 rng(1);
  const Field phi = random_field(*space, rng);
  const EtaFunction u(space, phi, 0.0);
  // plain H^1 norm from the spectral symbol
  const Field modal = space->to_modal(phi);
  double h1 = 0.0;
  for (std::size_t j = 0; j < modal.size(); ++j) h1 += space->symbol()[j] * modal[j] * modal[j];
  CHECK_THAT(inner_product(u, u), WithinRel(h1 * space->modal_scale(), 1e-12));
  const EtaFunction charge(space, Field(space->size(), 0.0), 1.0);
  CHECK_THAT(inner_product(charge, charge), WithinRel(space->beta_one(), 1e-15));
}

TEST_CASE("inner product is symmetric and bilinear", "[field_space][property]") {
  const auto space = space2();
  std::mt19937_64 rng(2);
  for (int i = 0; i < 5; ++i) {
    const EtaFunction a = random_function(space, rng), b = random_function(space, rng),
                      c = random_function(space, rng);
    const double ab = inner_product(a, b);
    CHECK_THAT(inner_product(b, a), WithinRel(ab, 1e-13));
    const double lhs = inner_product(2.5 * a + b, c);
    const double rhs = 2.5 * inner_product(a, c) + inner_product(b, c);
    CHECK_THAT(lhs, WithinAbs(rhs, 1e-13 * (std::abs(lhs) + norm(a) * norm(c) + norm(b) * norm(c))));
  }
}

TEST_CASE("Helmholtz inverse is exact per mode", "[field_space]") {
  const auto space = space2();
  std::mt19937_64 rng(3);
  const Field f = random_field(*space, rng);
  const Field back = space->helmholtz_inverse(space->helmholtz_apply(f));
  double worst = 0.0, scale = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    worst = std::max(worst, std::abs(back[j] - f[j]));
    scale = std::max(scale, std::abs(f[j]));
  }
  CHECK(worst < 1e-12 * scale);
}

TEST_CASE("action and its value at the ground state", "[field_space]") {
  const auto space = space2();
  CHECK(action(EtaFunction::zero(space), p) == 0.0);
  const EtaFunction u = ground(space);
  const double c0 = ground_state_action(*profile(2, p));
  CHECK_THAT(action(u, p), WithinRel(c0, 1e-6));
  CHECK_THAT(action(u, p), WithinRel((p - 2.0) / (2.0 * p) * inner_product(u, u), 1e-6));
}

TEST_CASE("gradient matches central differences", "[field_space][property]") {
  const auto space = space2();
  std::mt19937_64 rng(4);
  CHECK(norm(gradient(EtaFunction::zero(space), p)) == 0.0);
  const EtaFunction base = ground(space) + 0.1 * random_function(space, rng);
  const EtaFunction g = gradient(base, p);
  const double eps = 1e-5;
  for (int i = 0; i < 20; ++i) {
    EtaFunction v = random_function(space, rng);
    v *= 1.0 / norm(v);
    const double fd = (action(base + eps * v, p) - action(base - eps * v, p)) / (2.0 * eps);
    REQUIRE_THAT(fd, WithinAbs(inner_product(g, v), 1e-6 * std::max(1.0, norm(g))));
  }
}

TEST_CASE("ground state alone is not critical for the coupled action", "[field_space]") {
  const auto space = space2();
  const EtaFunction g = gradient(ground(space), p);
  const double expected = -profile(2, p)->peak() / space->beta_one();
  // the cell-quadrature of int G Phi^{p-1} is second order in h
  CHECK_THAT(g.q(), WithinRel(expected, 1e-2));
  CHECK(g.q() != 0.0);
  CHECK(norm(EtaFunction(space, g.phi(), 0.0)) < 1e-3 * norm(ground(space)));
}

TEST_CASE("Hessian properties", "[field_space][property]") {
  const auto space = space2();
  std::mt19937_64 rng(5);
  const EtaFunction zero = EtaFunction::zero(space);
  const EtaFunction v = random_function(space, rng), w = random_function(space, rng);
  const EtaFunction hv0 = hessian_apply(zero, v, p);
  CHECK(norm(hv0 - v) <= 1e-13 * norm(v));

  const EtaFunction u = ground(space) + 0.2 * random_function(space, rng);
  const double vhw = inner_product(v, hessian_apply(u, w, p));
  const double whv = inner_product(w, hessian_apply(u, v, p));
  CHECK_THAT(vhw, WithinAbs(whv, 1e-10 * norm(v) * norm(w)));

  // variation bound ||H(W+x) v - H(W) v|| <= 2 ||x||^{p-2} ||v||
  const EtaFunction W = ground(space);
  for (int i = 0; i < 10; ++i) {
    EtaFunction x = random_function(space, rng);
    x *= 1e-2 * (i + 1) / norm(x);
    const EtaFunction dv = hessian_apply(W + x, v, p) - hessian_apply(W, v, p);
    CHECK(norm(dv) <= 2.0 * std::pow(norm(x), p - 2.0) * norm(v) * 1.1);
  }
}

TEST_CASE("second variation at the ground state", "[field_space]") {
  const auto space = space2();
  const EtaFunction phi = ground(space);
  const auto profile27 = profile(2, p);
  const double ratio = inner_product(hessian_apply(phi, phi, p), phi) / inner_product(phi, phi);
  // u |u|^{p-2} nonlinearity: S''[Phi, Phi] = (2 - p) ||Phi||^2
  CHECK_THAT(ratio, WithinAbs(2.0 - p, 1e-3));
  CHECK(ratio < 0.0);

  std::vector<EtaFunction> kernel;
  for (int axis = 0; axis < 2; ++axis) {
    const EtaFunction d(space, test_support::profile_derivative(*space, *profile27, axis), 0.0);
    CHECK(norm(hessian_apply(phi, d, p)) < 1e-3 * norm(d));
    kernel.push_back(d);
  }

  // coercivity on the complement of span{Phi, d_i Phi}
  std::vector<EtaFunction> basis{phi, kernel[0], kernel[1]};
  std::mt19937_64 rng(6);
  double smallest = 1e300;
  for (int i = 0; i < 20; ++i) {
    EtaFunction w(space, random_field(*space, rng, 4.0), 0.0);
    for (int sweep = 0; sweep < 2; ++sweep) {
      for (const EtaFunction& b : basis) w -= (inner_product(w, b) / inner_product(b, b)) * b;
    }
    smallest = std::min(smallest, inner_product(hessian_apply(phi, w, p), w) / inner_product(w, w));
  }
  INFO("coercivity constant " << smallest);
  CHECK(smallest > 0.0);
}

TEST_CASE("L^r norms", "[field_space]") {
  const auto space = space2();
  const auto phi = profile(2, p);
  const double radial =
      std::sqrt(2.0 * pi *
                composite_gauss([&](double s) { return s * phi->value(s) * phi->value(s); }, 0.0,
                                30.0, 300, 8));
  CHECK_THAT(lp_norm(ground(space), 2.0), WithinRel(radial, 1e-6));

  const EtaFunction g1(space, Field(space->size(), 0.0), 1.0);
  const EtaFunction g3(space, Field(space->size(), 0.0), -3.0);
  CHECK_THAT(lp_norm(g3, 2.5), WithinRel(3.0 * lp_norm(g1, 2.5), 1e-12));

  std::mt19937_64 rng(8);
  for (int i = 0; i < 10; ++i) {
    const EtaFunction a = random_function(space, rng), b = random_function(space, rng);
    CHECK(lp_norm(a + b, 3.0) <= lp_norm(a, 3.0) + lp_norm(b, 3.0) + 1e-12);
  }
  CHECK_THROWS_AS(lp_norm(g1, 1.5), Error);
}

TEST_CASE("three-dimensional domain restrictions", "[field_space][errors]") {
  const auto space = FieldSpace::create(GridSpec{Dimension::three(), 12.0, 32}, std::exp(5.0));
  const EtaFunction g(space, Field(space->size(), 0.0), 1.0);
  CHECK_THROWS_AS(lp_norm(g, 3.0), Error);
  CHECK_THROWS_AS(action(g, 3.0), Error);
  CHECK(std::isfinite(lp_norm(g, 2.5)));
}

TEST_CASE("mismatched spaces are rejected", "[field_space][errors]") {
  const auto a = space2();
  const auto b = FieldSpace::create(GridSpec{Dimension::two(), 32.0, 256}, std::exp(7.0));
  const auto c = FieldSpace::create(GridSpec{Dimension::two(), 32.0, 128}, std::exp(6.0));
  try {
    (void)inner_product(EtaFunction::zero(a), EtaFunction::zero(b));
    FAIL("expected an incompatibility error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::incompatible);
  }
  CHECK_THROWS_AS(EtaFunction::zero(a) + EtaFunction::zero(c), Error);
}

TEST_CASE("snapshot round trip", "[field_space]") {
  const auto space = space2();
  std::mt19937_64 rng(9);
  const EtaFunction u = random_function(space, rng);
  const auto path = std::filesystem::temp_directory_path() / "multipeak_snapshot_test.bin";
  save_snapshot(u, path);
  const EtaFunction v = load_snapshot(path);
  std::filesystem::remove(path);
  CHECK(v.q() == u.q());
  CHECK(v.space().grid() == u.space().grid());
  CHECK(v.space().eta() == u.space().eta());
  CHECK(std::equal(v.phi().begin(), v.phi().end(), u.phi().begin()));
}
