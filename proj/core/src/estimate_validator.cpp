#include "multipeak/estimate_validator.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "multipeak/errors.hpp"
#include "multipeak/quadrature.hpp"

namespace multipeak {

namespace {

const char* const module = "estimate_validator";

using Engine = std::mt19937_64;

double uniform(Engine& engine, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(engine);
}

double random_sign(Engine& engine) {
  return std::bernoulli_distribution(0.5)(engine) ? 1.0 : -1.0;
}

/// Magnitudes spread over several decades so that lopsided tuples are sampled.
double spread_value(Engine& engine, double decades) {
  return random_sign(engine) * std::pow(10.0, uniform(engine, -decades, 0.0));
}

Point random_direction(Engine& engine, Dimension dim) {
  std::normal_distribution<double> normal;
  Point v{normal(engine), normal(engine), dim.is_two() ? 0.0 : normal(engine)};
  const double length = norm(v, dim);
  for (double& c : v) c /= length;
  return v;
}

double dot(const Point& a, const Point& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

void count(InequalityReport& report, double lhs, double bound, double scale) {
  ++report.samples;
  const double slack = (lhs - bound) / scale;
  report.max_slack = report.samples == 1 ? slack : std::max(report.max_slack, slack);
  if (lhs > bound + inequality_floor * scale) ++report.violations;
}

WeightedErrorReport summarize(std::vector<double> radii, std::vector<double> weighted) {
  WeightedErrorReport report;
  const std::size_t n = weighted.size();
  const std::size_t third = std::max<std::size_t>(1, n / 3);
  for (std::size_t i = 0; i < third; ++i) report.head_max = std::max(report.head_max, weighted[i]);
  for (std::size_t i = n - third; i < n; ++i)
    report.tail_max = std::max(report.tail_max, weighted[i]);
  report.last = weighted.back();
  report.radii = std::move(radii);
  report.weighted = std::move(weighted);
  return report;
}

std::vector<double> linear_samples(double lo, double hi, int n) {
  if (n < 3 || !(hi > lo))
    raise(ErrorKind::domain, module, "window with lo < hi and at least 3 samples",
          "got [" + std::to_string(lo) + ", " + std::to_string(hi) + "] with " +
              std::to_string(n));
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  return out;
}

/// Tanh-sinh quadrature over [a, b]. The rule runs on [-1/4, 1/4], where the
/// library keeps abscissas strictly inside the interval near both ends.
template <typename F>
double integrate_interval(F&& f, double a, double b, double tolerance) {
  thread_local boost::math::quadrature::tanh_sinh<double> integrator;
  const double width = b - a;
  auto mapped = [&](double v) { return f(a + 2.0 * width * (v + 0.25)); };
  return 2.0 * width * integrator.integrate(mapped, -0.25, 0.25, tolerance);
}

}  // namespace

void ValidatorParams::validate() const {
  if (samples == 0) raise(ErrorKind::configuration, module, "positive sample count", "got 0");
  if (!(delta >= 0.0 && delta < 0.5))
    raise(ErrorKind::configuration, module, "ball exponent delta in [0, 1/2)",
          "got " + std::to_string(delta));
  if (!(ball >= 0.0 && ball <= 1.0))
    raise(ErrorKind::configuration, module, "ball scale in [0, 1]", "got " + std::to_string(ball));
  if (!(epsilon > 0.0 && epsilon < 1.0))
    raise(ErrorKind::configuration, module, "epsilon in (0, 1)", "got " + std::to_string(epsilon));
  if (!(angle_threshold > 0.0))
    raise(ErrorKind::configuration, module, "positive angle threshold",
          "got " + std::to_string(angle_threshold));
}

InequalityReport check_elementary_1(std::size_t samples, std::uint64_t seed) {
  Engine engine(seed);
  InequalityReport report;
  for (std::size_t i = 0; i < samples; ++i) {
    const double r = 1.0 - uniform(engine, 0.0, 1.0);
    double a = spread_value(engine, 4.0);
    double b = spread_value(engine, 4.0);
    const double scale = std::max(std::abs(a), std::abs(b));
    a /= scale;
    b /= scale;
    const double lhs = std::abs(std::pow(std::abs(a + b), r) - std::pow(std::abs(a), r));
    count(report, lhs, std::pow(std::abs(b), r), 1.0);
  }
  return report;
}

double expansion_defect(std::span<const double> a, double r) {
  double sum = 0.0;
  double powers = 0.0;
  double cross = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    sum += a[k];
    powers += std::pow(std::abs(a[k]), r);
    for (std::size_t l = 0; l < a.size(); ++l)
      if (l != k) cross += a[k] * a[l] * std::pow(std::abs(a[l]), r - 2.0);
  }
  return std::abs(std::pow(std::abs(sum), r) - powers - 2.0 * cross);
}

double triple_sum_bound(std::span<const double> a, double r) {
  double total = 0.0;
  for (std::size_t k3 = 0; k3 < a.size(); ++k3) {
    double others = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
      if (k != k3) others += std::abs(a[k]);
    total += others * others * std::pow(std::abs(a[k3]), r - 2.0);
  }
  return r * total;
}

InequalityReport check_elementary_2(int K, double r, std::size_t samples, std::uint64_t seed) {
  if (K < 2 || K > 6)
    raise(ErrorKind::domain, module, "tuple length 2 <= K <= 6", "got " + std::to_string(K));
  if (!(r > 2.0 && r <= 3.0))
    raise(ErrorKind::domain, module, "exponent 2 < r <= 3", "got " + std::to_string(r));
  Engine engine(seed);
  InequalityReport report;
  std::vector<double> a(static_cast<std::size_t>(K));
  for (std::size_t i = 0; i < samples; ++i) {
    double scale = 0.0;
    for (double& x : a) {
      x = spread_value(engine, 4.0);
      scale = std::max(scale, std::abs(x));
    }
    for (double& x : a) x /= scale;
    count(report, expansion_defect(a, r), triple_sum_bound(a, r), 1.0);
  }
  return report;
}

double taylor_remainder(double a, double b, double r) {
  const double linear = a == 0.0 ? 0.0 : r * b * a * std::pow(std::abs(a), r - 2.0);
  return std::abs(std::pow(std::abs(a + b), r) - std::pow(std::abs(a), r) - linear);
}

ConstantFit check_elementary_3(double M, double r, std::size_t samples, std::uint64_t seed) {
  if (!(M > 0.0)) raise(ErrorKind::domain, module, "M > 0", "got " + std::to_string(M));
  if (!(r >= 2.0)) raise(ErrorKind::domain, module, "exponent r >= 2", "got " + std::to_string(r));
  Engine engine(seed);
  ConstantFit fit;
  fit.bound = r * (r - 1.0) * std::pow(2.0, r - 2.0) / 2.0 * std::max(std::pow(M, r - 2.0), 1.0);
  for (std::size_t i = 0; i < samples; ++i) {
    const double a = uniform(engine, -M, M);
    const double b = random_sign(engine) * std::pow(10.0, uniform(engine, -3.0, 3.0));
    const double ratio = taylor_remainder(a, b, r) / (b * b + std::pow(std::abs(b), r));
    fit.fitted = std::max(fit.fitted, ratio);
    ++fit.samples;
  }
  return fit;
}

double angle_defect(const Point& y, const Point& x, Dimension dim) {
  const Point sum = y + x;
  const double ny = norm(y, dim);
  const double nx = norm(x, dim);
  const double s = norm(sum, dim) + ny;
  const double yx = dot(y, x);
  // |y + x| - |y| = (2 y.x + |x|^2) / s, and the defect is |x|^2 / s minus
  // (y.x / |y|) (|y + x| - |y|) / s.
  const double difference = (2.0 * yx + nx * nx) / s;
  return std::abs(nx * nx / s - yx / ny * difference / s);
}

double angle_bound(const Point& y, const Point& x, Dimension dim) {
  const double nx = norm(x, dim);
  return 2.0 * nx * nx / (norm(y + x, dim) + norm(y, dim));
}

AngleReport check_angle_estimates(const ValidatorParams& params, Dimension dim) {
  params.validate();
  Engine engine(params.seed);
  AngleReport report;
  for (std::size_t i = 0; i < params.samples; ++i) {
    const double delta = uniform(engine, 0.0, params.delta);
    const double length = params.angle_threshold * std::pow(10.0, uniform(engine, 0.0, 3.0));
    Point y = random_direction(engine, dim);
    for (double& c : y) c *= length;
    Point x = random_direction(engine, dim);
    const double reach = std::pow(length, delta) * (1.0 - uniform(engine, 0.0, 1.0));
    for (double& c : x) c *= reach;
    const double defect = angle_defect(y, x, dim);
    const double sharp = angle_bound(y, x, dim);
    count(report.sharp, defect, sharp, 1.0);
    count(report.power, defect, 2.0 * std::pow(length, 2.0 * delta - 1.0), 1.0);
    if (sharp > 0.0) report.max_ratio = std::max(report.max_ratio, defect / sharp);
  }
  return report;
}

DecayProfile DecayProfile::envelope(double rate, double power) {
  if (!(rate > 0.0))
    raise(ErrorKind::domain, module, "positive envelope rate", "got " + std::to_string(rate));
  return {"envelope(" + std::to_string(rate) + ", " + std::to_string(power) + ")",
          [rate, power](double s) { return -rate * s - power * std::log(s); }, rate, power};
}

DecayProfile DecayProfile::ground_state(std::shared_ptr<const RadialProfile> profile) {
  const double power = 0.5 * (profile->dim().value() - 1);
  return {"ground_state", [profile](double s) { return profile->log_value(s); }, 1.0, power};
}

DecayProfile DecayProfile::ground_state_slope(std::shared_ptr<const RadialProfile> profile) {
  const double power = 0.5 * (profile->dim().value() - 1);
  return {"ground_state_slope",
          [profile](double s) {
            // Phi'/Phi is bounded, so the tail stays finite past underflow of Phi.
            const double ratio = profile->derivative(std::min(s, profile->s_max())) /
                                 profile->value(std::min(s, profile->s_max()));
            return profile->log_value(s) + std::log(std::abs(ratio));
          },
          1.0, power};
}

double convolution_integral(const DecayProfile& u1, const DecayProfile& u2, double r, Dimension dim,
                            double separation, DecayRegion region, double delta, double ball) {
  if (!(separation > 0.0))
    raise(ErrorKind::domain, module, "positive separation", "got " + std::to_string(separation));
  if (!(r > 1.0)) raise(ErrorKind::domain, module, "exponent r > 1", "got " + std::to_string(r));
  const double d = separation;
  const int n = dim.value();
  const double inner_tolerance = 1e-10;

  // Average of |u1| over the sphere |x| = rho, times its area.
  auto angular = [&](double rho) {
    if (rho <= 0.0) return unit_sphere_area(dim) * std::exp(u1.log_abs(d));
    if (dim.is_two()) {
      // psi = pi - angle between x and -y; |x + y|^2 = (rho - d)^2 + 4 rho d sin^2(psi/2).
      auto f = [&](double psi) {
        const double half = std::sin(0.5 * psi);
        const double t = std::sqrt((rho - d) * (rho - d) + 4.0 * rho * d * half * half);
        return t > 0.0 ? std::exp(u1.log_abs(t)) : 0.0;
      };
      return 2.0 * integrate_interval(f, 0.0, pi, inner_tolerance);
    }
    auto f = [&](double t) { return t > 0.0 ? t * std::exp(u1.log_abs(t)) : 0.0; };
    return 2.0 * pi / (rho * d) * integrate_interval(f, std::abs(rho - d), rho + d, inner_tolerance);
  };
  auto radial = [&](double rho) {
    if (rho <= 0.0) return 0.0;
    const double weight = (n - 1) * std::log(rho) + (r - 1.0) * u2.log_abs(rho);
    return std::exp(weight) * angular(rho);
  };

  const double radius = ball * std::pow(d, delta);
  const double reach = d + 50.0 / ((r - 1.0) * u2.rate) + 10.0;
  double lo = 0.0;
  double hi = reach;
  if (region == DecayRegion::inner_ball) hi = std::min(radius, reach);
  if (region == DecayRegion::outer) lo = std::min(radius, reach);
  std::vector<double> cuts{lo};
  if (d > lo && d < hi) cuts.push_back(d);
  cuts.push_back(hi);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    if (cuts[i + 1] > cuts[i]) total += integrate_interval(radial, cuts[i], cuts[i + 1], 1e-9);
  return total;
}

DecayFitReport fit_convolution_decay(const DecayProfile& u1, const DecayProfile& u2, double r,
                                     Dimension dim, const DecayWindow& window, DecayRegion region,
                                     double delta, double ball) {
  const int n = dim.value();
  if (!((r - 1.0) * u2.rate > u1.rate))
    raise(ErrorKind::domain, module, "(r - 1) alpha2 > alpha1",
          "alpha1 = " + std::to_string(u1.rate) + ", alpha2 = " + std::to_string(u2.rate));
  if (!(u1.power < n) || !((r - 1.0) * u2.power < n))
    raise(ErrorKind::domain, module, "beta1 < N and (r - 1) beta2 < N",
          "beta1 = " + std::to_string(u1.power) + ", beta2 = " + std::to_string(u2.power));
  if (window.samples < 8)
    raise(ErrorKind::fit_quality, module, "at least 8 decay samples",
          "got " + std::to_string(window.samples));
  if (!(u1.rate * (window.y_max - window.y_min) >= 10.0))
    raise(ErrorKind::fit_quality, module, "window spanning ten e-foldings",
          "rate * width = " + std::to_string(u1.rate * (window.y_max - window.y_min)));

  DecayFitReport report;
  Engine engine(window.seed);
  const double step = (window.y_max - window.y_min) / (window.samples - 1);
  for (int i = 0; i < window.samples; ++i) {
    double y = window.y_min + i * step;
    if (i > 0 && i + 1 < window.samples) y += uniform(engine, -0.25, 0.25) * step;
    report.separations.push_back(y);
    report.integrals.push_back(convolution_integral(u1, u2, r, dim, y, region, delta, ball));
  }
  std::vector<double> logs;
  std::vector<double> log_y;
  for (std::size_t i = 0; i < report.separations.size(); ++i) {
    if (!(report.integrals[i] > 0.0))
      raise(ErrorKind::fit_quality, module, "positive convolution integrals",
            "zero integral at |y| = " + std::to_string(report.separations[i]));
    logs.push_back(std::log(report.integrals[i]));
    log_y.push_back(std::log(report.separations[i]));
  }
  const PlaneFit fit = fit_plane(report.separations, log_y, logs);
  report.rate = -fit.c1;
  report.power = fit.c2;
  report.max_residual = fit.max_residual;
  report.target_rate = u1.rate;
  report.target_power = region == DecayRegion::inner_ball
                            ? delta * (n - (r - 1.0) * u2.power) - u1.power
                            : n - u1.power - (r - 1.0) * u2.power;
  report.rate_margin = report.rate - (report.target_rate - rate_allowance);
  report.power_margin = report.target_power + power_allowance - report.power;
  return report;
}

WeightedErrorReport check_greens_expansion_2d(double z_min, double z_max, int samples) {
  if (!(z_min >= 2.0))
    raise(ErrorKind::domain, module, "|z| >= 2", "got " + std::to_string(z_min));
  const GreensEvaluator green(1.0, Dimension::two());
  const double lead = 1.0 / (std::pow(2.0, 1.5) * std::sqrt(pi));
  std::vector<double> radii = linear_samples(z_min, z_max, samples);
  std::vector<double> weighted;
  for (double z : radii) {
    const double scaled = green.radial(z) * std::exp(z) * std::sqrt(z);
    weighted.push_back(std::abs(scaled - lead) * z);
  }
  return summarize(std::move(radii), std::move(weighted));
}

WeightedErrorReport check_error_in_limit(const RadialProfile& profile, double amplitude,
                                         double epsilon, double s_min, double s_max, int samples) {
  const int n = profile.dim().value();
  std::vector<double> radii = linear_samples(s_min, s_max, samples);
  std::vector<double> weighted;
  for (double s : radii) {
    const double scaled = std::exp(profile.log_value(s) + s) * std::pow(s, 0.5 * (n - 1));
    weighted.push_back(std::abs(scaled - amplitude) * std::pow(s, 1.0 - 0.5 * epsilon));
  }
  return summarize(std::move(radii), std::move(weighted));
}

WeightedErrorReport check_interaction_error(const RadialProfile& profile, double epsilon,
                                            double y_min, double y_max, int samples) {
  const int n = profile.dim().value();
  std::vector<double> radii = linear_samples(y_min, y_max, samples);
  std::vector<double> weighted;
  for (double y : radii) {
    const double gap = interaction_integral(profile, y) - profile.theta() * profile.value(y);
    weighted.push_back(std::abs(gap) * std::exp(y) * std::pow(y, 0.5 * (n + 1 - epsilon)));
  }
  return summarize(std::move(radii), std::move(weighted));
}

SymmetryReport check_symmetric_integral(const RadialProfile& profile, int directions,
                                        std::uint64_t seed) {
  Engine engine(seed);
  SymmetryReport report;
  report.reference = theta_phi(profile);
  for (int i = 0; i < directions; ++i) {
    const double value = theta_phi(profile, random_direction(engine, profile.dim()));
    report.values.push_back(value);
    report.max_relative =
        std::max(report.max_relative, std::abs(value - report.reference) / report.reference);
  }
  return report;
}

bool ValidationSummary::passed() const noexcept {
  return std::all_of(entries.begin(), entries.end(),
                     [](const ValidationEntry& e) { return !e.gated || e.passed; });
}

namespace {

ValidationEntry inequality_entry(std::string name, const InequalityReport& report) {
  return {std::move(name),
          true,
          report.passed(),
          {{"samples", static_cast<double>(report.samples)},
           {"violations", static_cast<double>(report.violations)},
           {"max_slack", report.max_slack}}};
}

ValidationEntry decay_entry(std::string name, bool gated, const DecayFitReport& report) {
  return {std::move(name),
          gated,
          report.passed(),
          {{"rate", report.rate},
           {"power", report.power},
           {"target_rate", report.target_rate},
           {"target_power", report.target_power},
           {"rate_margin", report.rate_margin},
           {"power_margin", report.power_margin},
           {"max_residual", report.max_residual}}};
}

ValidationEntry weighted_entry(std::string name, bool gated, const WeightedErrorReport& report) {
  return {std::move(name),
          gated,
          report.passed(),
          {{"head_max", report.head_max}, {"tail_max", report.tail_max}, {"last", report.last}}};
}

std::string dim_tag(const RadialProfile& profile) {
  return "N" + std::to_string(profile.dim().value());
}

}  // namespace

ValidationSummary run_validation(const ValidatorParams& params,
                                 std::span<const std::shared_ptr<const RadialProfile>> profiles) {
  params.validate();
  ValidationSummary summary;
  auto& out = summary.entries;
  std::uint64_t seed = params.seed;

  out.push_back(inequality_entry("elementary_1", check_elementary_1(params.samples, seed++)));
  for (double r : {2.2, 2.6, 3.0})
    for (int K = 2; K <= 6; ++K)
      out.push_back(inequality_entry(
          "elementary_2_K" + std::to_string(K) + "_r" + std::to_string(r).substr(0, 3),
          check_elementary_2(K, r, params.samples, seed++)));
  for (auto [M, r] : {std::pair{2.0, 2.5}, std::pair{0.5, 3.0}}) {
    const ConstantFit fit = check_elementary_3(M, r, params.samples, seed++);
    out.push_back({"elementary_3_M" + std::to_string(M).substr(0, 3) + "_r" +
                       std::to_string(r).substr(0, 3),
                   true,
                   fit.passed(),
                   {{"fitted", fit.fitted}, {"bound", fit.bound}}});
  }
  for (Dimension dim : {Dimension::two(), Dimension::three()}) {
    ValidatorParams angle = params;
    angle.seed = seed++;
    const AngleReport report = check_angle_estimates(angle, dim);
    ValidationEntry entry = inequality_entry("angle_N" + std::to_string(dim.value()), report.sharp);
    entry.passed = report.passed();
    entry.metrics.emplace_back("power_violations", static_cast<double>(report.power.violations));
    entry.metrics.emplace_back("max_ratio", report.max_ratio);
    out.push_back(std::move(entry));
  }
  out.push_back(weighted_entry("greens_expansion_N2", true, check_greens_expansion_2d()));

  for (const auto& profile : profiles) {
    const std::string tag = dim_tag(*profile);
    const Dimension dim = profile->dim();
    const double p = profile->p();
    const double s_hi = std::min(30.0, profile->s_max());
    out.push_back(weighted_entry(
        "error_in_limit_" + tag, true,
        check_error_in_limit(*profile, profile->tail_amplitude(), params.epsilon, 5.0, s_hi, 26)));
    out.push_back(weighted_entry(
        "error_in_limit_integral_constant_" + tag, false,
        check_error_in_limit(*profile, profile->theta(), params.epsilon, 5.0, s_hi, 26)));
    out.push_back(weighted_entry("interaction_" + tag, true,
                                 check_interaction_error(*profile, params.epsilon, 6.0, 24.0, 10)));
    const SymmetryReport symmetry = check_symmetric_integral(*profile, 8, seed++);
    out.push_back({"symmetric_integral_" + tag,
                   true,
                   symmetry.passed(),
                   {{"reference", symmetry.reference}, {"max_relative", symmetry.max_relative}}});

    DecayWindow window;
    window.seed = seed++;
    const DecayProfile exponential = DecayProfile::envelope(1.0, 0.0);
    const DecayProfile singular = DecayProfile::envelope(1.0, 0.5);
    const DecayProfile phi = DecayProfile::ground_state(profile);
    out.push_back(decay_entry("decay_exponential_" + tag, true,
                              fit_convolution_decay(exponential, exponential, p, dim, window)));
    out.push_back(decay_entry("decay_singular_envelope_" + tag, true,
                              fit_convolution_decay(singular, singular, p, dim, window)));
    out.push_back(
        decay_entry("decay_ground_state_" + tag, true, fit_convolution_decay(phi, phi, p, dim, window)));
    out.push_back(decay_entry("decay_inner_ball_" + tag, true,
                              fit_convolution_decay(phi, phi, p, dim, window,
                                                    DecayRegion::inner_ball, params.delta,
                                                    params.ball)));
    out.push_back(decay_entry("decay_outer_region_" + tag, false,
                              fit_convolution_decay(phi, phi, p, dim, window, DecayRegion::outer,
                                                    params.delta, params.ball)));
    out.push_back(decay_entry(
        "decay_slope_pair_" + tag, false,
        fit_convolution_decay(DecayProfile::ground_state_slope(profile), phi, p, dim, window)));
  }
  return summary;
}

}  // namespace multipeak
