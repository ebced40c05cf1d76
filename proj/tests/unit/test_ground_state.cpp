#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <random>

#include "multipeak/errors.hpp"
#include "multipeak/ground_state.hpp"
#include "multipeak/quadrature.hpp"
#include "oracle_values.hpp"
#include "support.hpp"

using namespace multipeak;
using Catch::Matchers::WithinRel;
using test_support::profile;

namespace {

struct Case {
  int dim;
  double p;
  double phi0;
  double tail;
  double h1sq;
};

const Case cases[] = {
    {2, 3.0, oracle::phi0_n2_p3, oracle::tail_n2_p3, oracle::h1sq_n2_p3},
    {3, 2.6, oracle::phi0_n3_p26, oracle::tail_n3_p26, oracle::h1sq_n3_p26},
    {2, 2.7, oracle::phi0_n2_p27, oracle::tail_n2_p27, oracle::h1sq_n2_p27},
};

}  // namespace

TEST_CASE("shooting agrees with the relaxation oracle", "[ground_state]") {
  for (const Case& c : cases) {
    const auto phi = profile(c.dim, c.p);
    INFO("N = " << c.dim << ", p = " << c.p);
    CHECK_THAT(phi->peak(), WithinRel(c.phi0, 1e-6));
    CHECK_THAT(h1_norm_squared(*phi), WithinRel(c.h1sq, 1e-5));
    CHECK_THAT(ground_state_action(*phi), WithinRel((c.p - 2.0) / (2.0 * c.p) * c.h1sq, 1e-5));
  }
}

TEST_CASE("profile is positive, flat at the origin and decreasing", "[ground_state][property]") {
  for (const Case& c : cases) {
    const auto phi = profile(c.dim, c.p);
    CHECK(phi->derivative(0.0) == 0.0);
    const auto values = phi->values();
    for (std::size_t i = 1; i < values.size(); ++i) {
      REQUIRE(values[i] > 0.0);
      REQUIRE(values[i] < values[i - 1]);
    }
  }
}

TEST_CASE("ODE residual on a twice finer grid", "[ground_state]") {
  for (const Case& c : cases) {
    const auto phi = profile(c.dim, c.p);
    double worst = 0.0;
    for (double s = 0.5 * phi->spacing(); s < 20.0; s += phi->spacing())
      worst = std::max(worst, std::abs(phi->ode_residual(s)));
    INFO("N = " << c.dim << ", p = " << c.p << ", residual " << worst);
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("profile is stable under radial grid refinement", "[ground_state][property]") {
  GroundStateParams fine;
  fine.dim = Dimension::two();
  fine.p = 2.7;
  fine.node_count = 20481;
  const RadialProfile refined = solve_ground_state(fine);
  const auto coarse = profile(2, 2.7);
  for (double s : {0.0, 1.0, 3.0, 8.0, 15.0})
    CHECK_THAT(refined.value(s), WithinRel(coarse->value(s), 1e-6));
}

TEST_CASE("theta_phi is positive and direction independent", "[ground_state]") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (const Case& c : cases) {
    const auto phi = profile(c.dim, c.p);
    const double reference = theta_phi(*phi);
    CHECK(reference > 0.0);
    CHECK_THAT(phi->theta(), WithinRel(reference, 1e-10));
    for (int i = 0; i < 8; ++i) {
      Point z{g(rng), g(rng), c.dim == 3 ? g(rng) : 0.0};
      const double n = norm(z, Dimension(c.dim));
      for (double& x : z) x /= n;
      CHECK_THAT(theta_phi(*phi, z), WithinRel(reference, 1e-8));
    }
  }
}

TEST_CASE("tail amplitude matches a tail fit", "[ground_state]") {
  // The limit of s^{(N-1)/2} e^s Phi(s) is c_N theta_phi, with c_N the
  // far-field prefactor of G.
  for (const Case& c : cases) {
    const auto phi = profile(c.dim, c.p);
    const Dimension dim(c.dim);
    INFO("N = " << c.dim << ", p = " << c.p);
    CHECK_THAT(phi->tail_amplitude(), WithinRel(c.tail, 0.02));
    CHECK_THAT(phi->tail_amplitude(),
               WithinRel(green_far_field_prefactor(dim) * phi->theta(), 0.02));
    double previous = 0.0;
    for (double s = 6.0; s <= 16.0; s += 1.0) {
      const double scaled = std::pow(s, (c.dim - 1) / 2.0) * std::exp(s) * phi->value(s);
      REQUIRE(scaled > previous);
      previous = scaled;
    }
    const double at12 = std::pow(12.0, (c.dim - 1) / 2.0) * std::exp(12.0) * phi->value(12.0);
    CHECK_THAT(at12, WithinRel(phi->tail_amplitude(), 0.02));
  }
}

TEST_CASE("interaction integral", "[ground_state]") {
  const auto p3 = profile(2, 3.0);
  const auto p27 = profile(2, 2.7);
  CHECK_THAT(interaction_integral(*p3, 12.0), WithinRel(oracle::interaction12_n2_p3, 1e-4));
  CHECK_THAT(interaction_integral(*p27, 12.0), WithinRel(oracle::interaction12_n2_p27, 1e-4));
  for (const Case& c : cases) {
    const auto phi = profile(c.dim, c.p);
    for (double y = 10.0; y <= 15.0; y += 0.5)
      CHECK_THAT(interaction_integral(*phi, y), WithinRel(phi->theta() * phi->value(y), 0.05));
  }
}

TEST_CASE("interaction integral ratio tends to one", "[ground_state][property]") {
  for (const Case& c : cases) {
    const auto phi = profile(c.dim, c.p);
    double previous = 1.0;
    for (double y = 10.0; y <= 30.0; y += 2.5) {
      const double gap = std::abs(interaction_integral(*phi, y) / (phi->theta() * phi->value(y)) - 1.0);
      CHECK(gap <= previous);
      previous = gap;
    }
    CHECK(previous < 1e-4);
  }
}

TEST_CASE("interaction integral decay exponents", "[ground_state][property]") {
  // Upper bound N - beta1 - (r-1) beta2 from the entire-space convolution
  // estimate; the actual power is that of Phi itself.
  for (const Case& c : cases) {
    const auto phi = profile(c.dim, c.p);
    std::vector<double> y, logy, logi;
    for (double s = 10.0; s <= 30.0; s += 2.0) {
      y.push_back(s);
      logy.push_back(std::log(s));
      logi.push_back(std::log(interaction_integral(*phi, s)));
    }
    const PlaneFit fit = fit_plane(y, logy, logi);
    const double bound = c.dim - (c.dim - 1) / 2.0 - (c.p - 1.0) * (c.dim - 1) / 2.0;
    INFO("N = " << c.dim << ", p = " << c.p << ", rate " << -fit.c1 << ", power " << fit.c2);
    CHECK(std::abs(-fit.c1 - 1.0) < 0.05);
    CHECK(fit.c2 <= bound + 0.3);
    CHECK(std::abs(fit.c2 + (c.dim - 1) / 2.0) < 0.3);
  }
}

TEST_CASE("error in the limit", "[ground_state]") {
  for (const Case& c : cases) {
    const auto phi = profile(c.dim, c.p);
    INFO("N = " << c.dim << ", p = " << c.p);
    double head = 0.0, tail = 0.0, previous_ratio = 1.0;
    for (double s = 8.0; s <= 20.0; s += 0.5) {
      const double e = asymptotic_error(*phi, s);
      const double weighted = e * std::exp(s) * std::pow(s, (c.dim + 1) / 2.0 - 0.5);
      (s <= 12.0 ? head : tail) = std::max(s <= 12.0 ? head : tail, weighted);
      const double ratio = e / phi->value(s);
      REQUIRE(ratio < previous_ratio);
      previous_ratio = ratio;
    }
    CHECK(tail <= 1.5 * head);
    std::vector<double> logs, loge;
    for (double s = 10.0; s <= 20.0; s += 1.0) {
      logs.push_back(std::log(s));
      loge.push_back(std::log(asymptotic_error(*phi, s)) + s);
    }
    CHECK(fit_line(logs, loge).slope <= -(c.dim + 1) / 2.0 + 0.6);
  }
}

TEST_CASE("convolution identity", "[ground_state]") {
  for (const Case& c : cases) {
    const auto phi = profile(c.dim, c.p);
    const ConvolutionCheck coarse = convolution_identity_check(*phi, 8);
    const ConvolutionCheck fine = convolution_identity_check(*phi, 16);
    INFO("N = " << c.dim << ", p = " << c.p);
    CHECK(fine.sup_error < 1e-4 * phi->peak());
    CHECK(coarse.sup_error >= 4.0 * fine.sup_error);
  }
}

TEST_CASE("profile file round trip", "[ground_state]") {
  const auto phi = profile(3, 2.6);
  const auto path = std::filesystem::temp_directory_path() / "multipeak_profile_test.csv";
  save_profile(*phi, path);
  const RadialProfile loaded = load_profile(path);
  std::filesystem::remove(path);
  CHECK(loaded.dim() == phi->dim());
  CHECK(loaded.p() == phi->p());
  CHECK(loaded.node_count() == phi->node_count());
  CHECK(loaded.tail_amplitude() == phi->tail_amplitude());
  for (double s : {0.0, 0.37, 5.0, 30.0, 45.0}) CHECK(loaded.value(s) == phi->value(s));
}

TEST_CASE("ground state parameter errors", "[ground_state][errors]") {
  GroundStateParams bad;
  bad.p = 3.0;
  bad.s_max = 10.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  GroundStateParams bracket;
  bracket.p = 3.0;
  bracket.bracket = std::pair{5.0, 6.0};
  try {
    (void)solve_ground_state(bracket);
    FAIL("expected a configuration error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::configuration);
  }
  CHECK_THROWS_AS(interaction_integral(*profile(2, 3.0), 0.0), Error);
  CHECK_THROWS_AS(interaction_integral(*profile(2, 3.0), 1e4), Error);
  CHECK_THROWS_AS(profile(2, 3.0)->ode_residual(0.0), Error);
}
