#include "multipeak/ground_state.hpp"

#include <algorithm>
#include <array>
#include <boost/numeric/odeint.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "multipeak/errors.hpp"
#include "multipeak/quadrature.hpp"

namespace multipeak {

namespace {

using State = std::array<long double, 2>;
namespace odeint = boost::numeric::odeint;
using Stepper = odeint::runge_kutta_fehlberg78<State, long double, State, long double>;

const char* const module = "ground_state";

struct RadialOde {
  long double n_minus_one;
  long double p;
  void operator()(const State& x, State& dxds, long double s) const {
    const long double u = x[0];
    const long double power = u == 0.0L ? 0.0L : std::pow(std::abs(u), p - 2.0L) * u;
    dxds[0] = x[1];
    dxds[1] = -n_minus_one / s * x[1] + u - power;
  }
};

enum class Shot { overshoot, undershoot, undecided };

// Fourth order series around s = 0: Phi = a + c2 s^2 + c4 s^4.
State series_start(long double a, long double p, int n, long double s) {
  const long double g = a - std::pow(a, p - 1.0L);
  const long double dg = 1.0L - (p - 1.0L) * std::pow(a, p - 2.0L);
  const long double c2 = g / (2.0L * n);
  const long double c4 = dg * c2 / (4.0L * (n + 2));
  return {a + c2 * s * s + c4 * s * s * s * s, 2.0L * c2 * s + 4.0L * c4 * s * s * s};
}

class Shooter {
 public:
  Shooter(const GroundStateParams& params)
      : ode_{static_cast<long double>(params.dim.value() - 1),
             static_cast<long double>(params.p)},
        n_(params.dim.value()),
        p_(params.p) {}

  Shot classify(long double a) const {
    auto stepper = odeint::make_controlled(1e-24L, 1e-18L, Stepper());
    long double s = start_radius;
    State x = series_start(a, p_, n_, s);
    const long double interval = 1.0L / 16.0L;
    while (s < 80.0L) {
      const long double next = std::floor(s / interval + 1.0L) * interval;
      odeint::integrate_adaptive(stepper, ode_, x, s, next, interval / 4.0L);
      s = next;
      if (x[0] < 0.0L) return Shot::overshoot;
      if (x[1] > 0.0L) return Shot::undershoot;
    }
    return Shot::undecided;
  }

  // Node values on [0, s_m]; stops at the first node past min_radius where
  // u < threshold * a. Returns the index of that node.
  int record(long double a, long double spacing, int max_nodes, double threshold,
             double min_radius, std::vector<double>& values,
             std::vector<double>& derivatives, State& matched) const {
    auto stepper = odeint::make_controlled(1e-24L, 1e-18L, Stepper());
    values.assign(1, static_cast<double>(a));
    derivatives.assign(1, 0.0);
    long double s = start_radius;
    State x = series_start(a, p_, n_, s);
    for (int i = 1; i < max_nodes; ++i) {
      const long double next = i * spacing;
      odeint::integrate_adaptive(stepper, ode_, x, s, next, spacing / 2.0L);
      s = next;
      if (x[0] <= 0.0L || x[1] >= 0.0L)
        raise(ErrorKind::tolerance, module, "positive decreasing ground state",
              "shooting solution left the monotone branch at s = " +
                  std::to_string(static_cast<double>(s)));
      values.push_back(static_cast<double>(x[0]));
      derivatives.push_back(static_cast<double>(x[1]));
      if (s >= min_radius && x[0] < threshold * a) {
        matched = x;
        return i;
      }
    }
    raise(ErrorKind::range, module, "tail threshold reached inside the radial grid",
          "profile did not drop below the tail threshold before s_max");
  }

  const RadialOde& ode() const { return ode_; }

 private:
  static constexpr long double start_radius = 1e-4L;
  RadialOde ode_;
  int n_;
  long double p_;
};

long double tail_shape_ld(int n, long double s) {
  if (n == 3) return std::exp(-s) / s;
  return std::sqrt(2.0L / static_cast<long double>(pi)) *
         static_cast<long double>(scaled_bessel_k(0.0, static_cast<double>(s))) *
         std::exp(-s);
}

long double tail_shape_derivative_ld(int n, long double s) {
  if (n == 3) return -std::exp(-s) * (1.0L / s + 1.0L / (s * s));
  return -std::sqrt(2.0L / static_cast<long double>(pi)) *
         static_cast<long double>(scaled_bessel_k(1.0, static_cast<double>(s))) *
         std::exp(-s);
}

std::string format_double(double x) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, x);
  return std::string(buffer, result.ptr);
}

double parse_double(const std::string& text) {
  double value = 0.0;
  const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  if (result.ec != std::errc() || result.ptr != text.data() + text.size())
    raise(ErrorKind::io, module, "profile cache format", "cannot parse number '" + text + "'");
  return value;
}

}  // namespace

void GroundStateParams::validate() const {
  const bool p_ok = dim.is_two() ? (p > 2.0 && p <= 3.0) : (p > 2.0 && p < 3.0);
  if (!p_ok)
    raise(ErrorKind::configuration, module,
          "exponent range 2 < p <= 3 (N = 2) or 2 < p < 3 (N = 3)",
          "got p = " + std::to_string(p) + " with N = " + std::to_string(dim.value()));
  if (!(s_max >= 25.0))
    raise(ErrorKind::configuration, module, "radial extent s_max >= 25",
          "got s_max = " + std::to_string(s_max));
  if (node_count < 16 * s_max)
    raise(ErrorKind::configuration, module, "at least 16 radial nodes per unit length",
          "got " + std::to_string(node_count) + " nodes on [0, " + std::to_string(s_max) + "]");
  if (!(shooting_tolerance > 0.0 && shooting_tolerance < 1e-6))
    raise(ErrorKind::configuration, module, "shooting tolerance in (0, 1e-6)",
          "got " + std::to_string(shooting_tolerance));
  if (!(tail_threshold > 0.0 && tail_threshold < 1e-3))
    raise(ErrorKind::configuration, module, "tail threshold in (0, 1e-3)",
          "got " + std::to_string(tail_threshold));
  if (!(min_match_radius > 0.0 && min_match_radius < s_max - 5.0))
    raise(ErrorKind::configuration, module, "matching radius inside the radial grid",
          "got " + std::to_string(min_match_radius));
}

RadialProfile::RadialProfile(Dimension dim, double p, double s_max,
                             std::vector<double> values, std::vector<double> derivatives,
                             double tail_amplitude, double matched_radius,
                             double matching_defect)
    : dim_(dim),
      p_(p),
      s_max_(s_max),
      spacing_(s_max / static_cast<double>(values.size() - 1)),
      values_(std::move(values)),
      derivatives_(std::move(derivatives)),
      tail_amplitude_(tail_amplitude),
      matched_radius_(matched_radius),
      matching_defect_(matching_defect) {
  if (values_.size() < 16 || values_.size() != derivatives_.size())
    raise(ErrorKind::configuration, module, "profile node arrays of equal length",
          "values and derivatives differ in size");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] > 0.0))
      raise(ErrorKind::validation, module, "ground state is positive",
            "nonpositive value at node " + std::to_string(i));
    if (i > 0 && !(values_[i] < values_[i - 1]))
      raise(ErrorKind::validation, module, "ground state is strictly decreasing",
            "monotonicity fails at node " + std::to_string(i));
  }
  if (derivatives_.front() != 0.0)
    raise(ErrorKind::validation, module, "Phi'(0) = 0", "nonzero derivative at the origin");
  second_derivatives_.resize(values_.size());
  for (int i = 0; i < node_count(); ++i) second_derivatives_[i] = node_second_derivative(i);
  far_amplitude_ = values_.back() / tail_shape(s_max_);
  theta_ = theta_phi(*this);
}

double RadialProfile::node_second_derivative(int i) const {
  const double u = values_[i];
  const double source = u - std::pow(u, p_ - 1.0);
  if (i == 0) return source / dim_.value();
  return source - (dim_.value() - 1) / node(i) * derivatives_[i];
}

RadialProfile::Hermite RadialProfile::interpolate(double s) const {
  const int last = node_count() - 1;
  const int i = std::min(static_cast<int>(s / spacing_), last - 1);
  const double h = spacing_;
  const double t = (s - node(i)) / h;
  const double y0 = values_[i];
  const double y1 = values_[i + 1];
  const double d0 = h * derivatives_[i];
  const double d1 = h * derivatives_[i + 1];
  const double a0 = h * h * second_derivatives_[i];
  const double a1 = h * h * second_derivatives_[i + 1];
  const double dy = y1 - y0;
  const double c2 = 0.5 * a0;
  const double c3 = 10.0 * dy - 6.0 * d0 - 4.0 * d1 - 0.5 * (3.0 * a0 - a1);
  const double c4 = -15.0 * dy + 8.0 * d0 + 7.0 * d1 + 0.5 * (3.0 * a0 - 2.0 * a1);
  const double c5 = 6.0 * dy - 3.0 * d0 - 3.0 * d1 - 0.5 * (a0 - a1);
  const double v = y0 + t * (d0 + t * (c2 + t * (c3 + t * (c4 + t * c5))));
  const double dv = d0 + t * (2.0 * c2 + t * (3.0 * c3 + t * (4.0 * c4 + t * 5.0 * c5)));
  const double ddv = 2.0 * c2 + t * (6.0 * c3 + t * (12.0 * c4 + t * 20.0 * c5));
  return {v, dv / h, ddv / (h * h)};
}

double RadialProfile::value(double s) const {
  s = std::abs(s);
  if (s <= s_max_) return interpolate(s).value;
  return far_amplitude_ * tail_shape(s);
}

double RadialProfile::derivative(double s) const {
  const double sign = s < 0.0 ? -1.0 : 1.0;
  s = std::abs(s);
  if (s <= s_max_) return sign * interpolate(s).first;
  return sign * far_amplitude_ * tail_shape_derivative(s);
}

double RadialProfile::second_derivative(double s) const {
  s = std::abs(s);
  if (s <= s_max_) return interpolate(s).second;
  const double u = value(s);
  return u - std::pow(u, p_ - 1.0) - (dim_.value() - 1) / s * derivative(s);
}

double RadialProfile::log_value(double s) const {
  s = std::abs(s);
  if (s <= s_max_) return std::log(interpolate(s).value);
  return std::log(far_amplitude_) + log_tail_shape(s);
}

double RadialProfile::ode_residual(double s) const {
  if (!(s > 0.0))
    raise(ErrorKind::domain, module, "residual at interior radii", "s must be positive");
  const Hermite h = s <= s_max_ ? interpolate(s)
                                : Hermite{value(s), derivative(s), second_derivative(s)};
  return h.second + (dim_.value() - 1) / s * h.first - h.value + std::pow(h.value, p_ - 1.0);
}

double RadialProfile::tail_shape(double s) const {
  return static_cast<double>(tail_shape_ld(dim_.value(), s));
}

double RadialProfile::tail_shape_derivative(double s) const {
  return static_cast<double>(tail_shape_derivative_ld(dim_.value(), s));
}

double RadialProfile::log_tail_shape(double s) const {
  if (!dim_.is_two()) return -s - std::log(s);
  return 0.5 * std::log(2.0 / pi) + std::log(scaled_bessel_k(0.0, s)) - s;
}

RadialProfile solve_ground_state(const GroundStateParams& params) {
  params.validate();
  const Shooter shooter(params);

  long double lo;
  long double hi;
  if (params.bracket) {
    lo = params.bracket->first;
    hi = params.bracket->second;
    if (!(lo > 0.0L && hi > lo) || shooter.classify(lo) != Shot::undershoot ||
        shooter.classify(hi) != Shot::overshoot)
      raise(ErrorKind::configuration, module, "initial bracket for Phi(0)",
            "interval [" + std::to_string(params.bracket->first) + ", " +
                std::to_string(params.bracket->second) +
                "] does not bracket the ground state");
  } else {
    lo = 1.0L + 1e-3L;
    hi = 2.0L;
    if (shooter.classify(lo) != Shot::undershoot)
      raise(ErrorKind::configuration, module, "initial bracket for Phi(0)",
            "lower end does not undershoot");
    int expansions = 0;
    while (shooter.classify(hi) != Shot::overshoot) {
      lo = hi;
      hi *= 2.0L;
      if (++expansions > 20)
        raise(ErrorKind::iteration_limit, module, "bracket for Phi(0)",
              "no overshooting initial value found");
    }
  }

  int iterations = 0;
  while (hi - lo > static_cast<long double>(params.shooting_tolerance) * lo) {
    const long double mid = 0.5L * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const Shot shot = shooter.classify(mid);
    if (shot == Shot::undecided) {
      lo = hi = mid;
      break;
    }
    (shot == Shot::overshoot ? hi : lo) = mid;
    if (++iterations > 400)
      raise(ErrorKind::iteration_limit, module, "bisection on Phi(0)",
            "no convergence after 400 bisection steps");
  }
  const long double a = 0.5L * (lo + hi);

  const int n = params.dim.value();
  const long double spacing =
      static_cast<long double>(params.s_max) / static_cast<long double>(params.node_count - 1);
  std::vector<double> values;
  std::vector<double> derivatives;
  State matched{};
  const int match_index =
      shooter.record(a, spacing, params.node_count, params.tail_threshold,
                     params.min_match_radius, values, derivatives, matched);
  const long double s_match = match_index * spacing;

  // Inward integration of the decaying solution from far out; its amplitude
  // is adjusted until it meets the shooting solution at s_match.
  const long double s_start =
      std::min(2000.0L, std::max(static_cast<long double>(params.s_max),
                                 36.0L / static_cast<long double>(params.p - 2.0)));
  const long double s_end = params.s_max;
  auto inward = [&](long double amplitude, std::vector<double>* v,
                    std::vector<double>* dv) {
    auto stepper = odeint::make_controlled(1e-300L, 1e-18L, Stepper());
    State x{amplitude * tail_shape_ld(n, s_start), amplitude * tail_shape_derivative_ld(n, s_start)};
    long double s = s_start;
    if (s_start > s_end) {
      odeint::integrate_adaptive(stepper, shooter.ode(), x, s, s_end, -spacing);
      s = s_end;
    }
    const int last = params.node_count - 1;
    if (v) {
      (*v)[last] = static_cast<double>(x[0]);
      (*dv)[last] = static_cast<double>(x[1]);
    }
    for (int i = last - 1; i >= match_index; --i) {
      const long double next = i * spacing;
      odeint::integrate_adaptive(stepper, shooter.ode(), x, s, next, -spacing / 2.0L);
      s = next;
      if (v) {
        (*v)[i] = static_cast<double>(x[0]);
        (*dv)[i] = static_cast<double>(x[1]);
      }
    }
    return x;
  };

  long double amplitude = matched[0] / tail_shape_ld(n, s_match);
  State joined{};
  for (int iter = 0;; ++iter) {
    joined = inward(amplitude, nullptr, nullptr);
    const long double ratio = matched[0] / joined[0];
    amplitude *= ratio;
    if (std::abs(ratio - 1.0L) < 1e-17L) break;
    if (iter > 40)
      raise(ErrorKind::iteration_limit, module, "tail amplitude matching",
            "secant matching of the tail did not converge");
  }
  values.resize(params.node_count);
  derivatives.resize(params.node_count);
  joined = inward(amplitude, &values, &derivatives);
  const double defect = static_cast<double>(std::abs(joined[1] - matched[1]) / std::abs(matched[1]));

  return RadialProfile(params.dim, params.p, params.s_max, std::move(values),
                       std::move(derivatives), static_cast<double>(amplitude),
                       static_cast<double>(s_match), defect);
}

namespace {

double radial_cutoff(const RadialProfile& profile) {
  return std::min(1500.0, profile.matched_radius() + 42.0 / (profile.p() - 2.0));
}

// e^rho Phi(rho)^{p-1} rho^{N-1}
double scaled_theta_weight(const RadialProfile& profile, double rho) {
  return std::exp(rho + (profile.p() - 1.0) * profile.log_value(rho)) *
         std::pow(rho, profile.dim().value() - 1);
}

// Integral over the unit sphere of e^{-rho (omega.z) - rho}.
double scaled_sphere_average(double rho, const Point& z, Dimension dim) {
  const int n_phi = 64 + 2 * static_cast<int>(std::ceil(rho));
  const double dphi = 2.0 * pi / n_phi;
  if (dim.is_two()) {
    double sum = 0.0;
    for (int j = 0; j < n_phi; ++j) {
      const double phi = j * dphi;
      sum += std::exp(-rho * (std::cos(phi) * z[0] + std::sin(phi) * z[1]) - rho);
    }
    return sum * dphi;
  }
  const GaussRule& rule = gauss_legendre(32 + static_cast<int>(std::ceil(rho)));
  double sum = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    const double mu = rule.nodes[k];
    const double sine = std::sqrt(1.0 - mu * mu);
    double ring = 0.0;
    for (int j = 0; j < n_phi; ++j) {
      const double phi = j * dphi;
      const double dot = sine * (std::cos(phi) * z[0] + std::sin(phi) * z[1]) + mu * z[2];
      ring += std::exp(-rho * dot - rho);
    }
    sum += rule.weights[k] * ring * dphi;
  }
  return sum;
}

// Closed form of the sphere average: 2 pi e^{-rho} I_0(rho) or
// 2 pi (1 - e^{-2 rho}) / rho.
double scaled_sphere_average_closed(double rho, Dimension dim) {
  if (!dim.is_two()) return rho > 0.0 ? 2.0 * pi * -std::expm1(-2.0 * rho) / rho : 4.0 * pi;
  const int n_phi = 32 + static_cast<int>(std::ceil(rho));
  const double dphi = pi / n_phi;
  double sum = 0.5 * (1.0 + std::exp(-2.0 * rho));
  for (int j = 1; j < n_phi; ++j) sum += std::exp(rho * (std::cos(j * dphi) - 1.0));
  return 2.0 * sum * dphi;
}

}  // namespace

double theta_phi(const RadialProfile& profile, const Point& z) {
  const double length = norm(z, profile.dim());
  if (std::abs(length - 1.0) > 1e-12)
    raise(ErrorKind::domain, module, "direction is a unit vector",
          "|z| = " + std::to_string(length));
  const Point unit = z;
  const double cutoff = radial_cutoff(profile);
  const int panels = static_cast<int>(std::ceil(cutoff / 0.5));
  return composite_gauss(
      [&](double rho) {
        return scaled_theta_weight(profile, rho) *
               scaled_sphere_average(rho, unit, profile.dim());
      },
      0.0, cutoff, panels, 8);
}

double theta_phi(const RadialProfile& profile) {
  const double cutoff = radial_cutoff(profile);
  auto integrand = [&](double rho) {
    return scaled_theta_weight(profile, rho) * scaled_sphere_average_closed(rho, profile.dim());
  };
  const int panels = static_cast<int>(std::ceil(cutoff / 0.5));
  const double coarse = composite_gauss(integrand, 0.0, cutoff, panels, 8);
  const double fine = composite_gauss(integrand, 0.0, cutoff, 2 * panels, 8);
  if (!(fine > 0.0) || std::abs(fine - coarse) > 1e-10 * fine)
    raise(ErrorKind::tolerance, module, "quadrature of the tail constant",
          "panel refinement changed the result from " + std::to_string(coarse) + " to " +
              std::to_string(fine));
  return fine;
}

double interaction_integral(const RadialProfile& profile, double separation) {
  if (!(separation > 0.0) || separation > 2.0 * profile.s_max())
    raise(ErrorKind::domain, module, "separation within the profile support",
          "separation " + std::to_string(separation) + " outside (0, " +
              std::to_string(2.0 * profile.s_max()) + "]");
  const double d = separation;
  const double p = profile.p();
  const double cutoff = d + 40.0 / (p - 1.0) + 10.0;
  const int panels = static_cast<int>(std::ceil(cutoff / 0.25));
  if (profile.dim().is_two()) {
    return composite_gauss(
        [&](double rho) {
          const int n_phi = 32 + static_cast<int>(std::ceil(32.0 * std::sqrt(rho * d)));
          const double dphi = pi / n_phi;
          auto f = [&](double phi) {
            return profile.value(std::sqrt(rho * rho + d * d + 2.0 * rho * d * std::cos(phi)));
          };
          double sum = 0.5 * (f(0.0) + f(pi));
          for (int j = 1; j < n_phi; ++j) sum += f(j * dphi);
          return 2.0 * sum * dphi * rho * std::exp((p - 1.0) * profile.log_value(rho));
        },
        0.0, cutoff, panels, 8);
  }
  return composite_gauss(
      [&](double rho) {
        if (rho == 0.0) return 0.0;
        const double a = std::abs(rho - d);
        const double b = rho + d;
        const int inner = std::max(1, static_cast<int>(std::ceil((b - a) / 0.5)));
        const double shell = composite_gauss(
            [&](double t) { return t * profile.value(t); }, a, b, inner, 8);
        return 2.0 * pi * rho / d * shell * std::exp((p - 1.0) * profile.log_value(rho));
      },
      0.0, cutoff, panels, 8);
}

double h1_norm_squared(const RadialProfile& profile) {
  const int n = profile.dim().value();
  const double cutoff = profile.s_max();
  const int panels = static_cast<int>(std::ceil(cutoff / 0.25));
  const double radial = composite_gauss(
      [&](double rho) {
        const double u = profile.value(rho);
        const double du = profile.derivative(rho);
        return std::pow(rho, n - 1) * (u * u + du * du);
      },
      0.0, cutoff, panels, 8);
  return unit_sphere_area(profile.dim()) * radial;
}

double ground_state_action(const RadialProfile& profile) {
  const double p = profile.p();
  return (p - 2.0) / (2.0 * p) * h1_norm_squared(profile);
}

double asymptotic_error(const RadialProfile& profile, double radius) {
  if (!(radius > 0.0) || radius > profile.s_max())
    raise(ErrorKind::domain, module, "radius within the profile support",
          "radius " + std::to_string(radius));
  const int n = profile.dim().value();
  const double model =
      profile.tail_amplitude() * std::exp(-radius) / std::pow(radius, 0.5 * (n - 1));
  return std::abs(profile.value(radius) - model);
}

ConvolutionCheck convolution_identity_check(const RadialProfile& profile, int resolution) {
  if (resolution < 1)
    raise(ErrorKind::domain, module, "positive quadrature resolution",
          "got " + std::to_string(resolution));
  ConvolutionCheck check;
  check.radii = {0.25, 0.5, 1.0, 2.0, 3.0, 5.0, 8.0};
  check.sup_error = 0.0;
  const double p = profile.p();
  const bool two = profile.dim().is_two();
  for (double s : check.radii) {
    auto source = [&](double rho) { return std::exp((p - 1.0) * profile.log_value(rho)); };
    auto kernel = [&](double rho) {
      if (two) {
        const double lo = std::min(rho, s);
        const double hi = std::max(rho, s);
        return rho * std::cyl_bessel_i(0.0, lo) * bessel_k(0.0, hi);
      }
      return rho * (std::exp(-std::abs(s - rho)) - std::exp(-(s + rho))) / (2.0 * s);
    };
    auto integrand = [&](double rho) { return kernel(rho) * source(rho); };
    const double far = s + 40.0;
    const int inner = static_cast<int>(std::ceil(s * resolution));
    const int outer = static_cast<int>(std::ceil((far - s) * resolution));
    const double convolution =
        composite_gauss(integrand, 0.0, s, inner, 2) + composite_gauss(integrand, s, far, outer, 2);
    const double error = std::abs(profile.value(s) - convolution);
    check.errors.push_back(error);
    check.sup_error = std::max(check.sup_error, error);
  }
  return check;
}

void save_profile(const RadialProfile& profile, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out)
    raise(ErrorKind::io, module, "writable profile cache", "cannot open " + path.string());
  out << "# N=" << profile.dim().value() << " p=" << format_double(profile.p())
      << " node_count=" << profile.node_count() << " s_max=" << format_double(profile.s_max())
      << " theta=" << format_double(profile.theta())
      << " A=" << format_double(profile.tail_amplitude())
      << " s_m=" << format_double(profile.matched_radius())
      << " defect=" << format_double(profile.matching_defect()) << '\n';
  for (int i = 0; i < profile.node_count(); ++i)
    out << format_double(profile.node(i)) << ',' << format_double(profile.values()[i]) << ','
        << format_double(profile.derivatives()[i]) << '\n';
  if (!out) raise(ErrorKind::io, module, "writable profile cache", "write failed");
}

RadialProfile load_profile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    raise(ErrorKind::io, module, "readable profile cache", "cannot open " + path.string());
  std::string header;
  std::getline(in, header);
  if (header.rfind("# ", 0) != 0)
    raise(ErrorKind::io, module, "profile cache format", "missing header line");
  std::istringstream fields(header.substr(2));
  std::string token;
  int dim = 0;
  int node_count = 0;
  double p = 0.0, s_max = 0.0, theta = 0.0, amplitude = 0.0, s_m = 0.0, defect = 0.0;
  while (fields >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos)
      raise(ErrorKind::io, module, "profile cache format", "bad header token " + token);
    const std::string key = token.substr(0, eq);
    const std::string value = token.substr(eq + 1);
    if (key == "N") dim = std::stoi(value);
    else if (key == "node_count") node_count = std::stoi(value);
    else if (key == "p") p = parse_double(value);
    else if (key == "s_max") s_max = parse_double(value);
    else if (key == "theta") theta = parse_double(value);
    else if (key == "A") amplitude = parse_double(value);
    else if (key == "s_m") s_m = parse_double(value);
    else if (key == "defect") defect = parse_double(value);
  }
  std::vector<double> values;
  std::vector<double> derivatives;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      raise(ErrorKind::io, module, "profile cache format", "bad row '" + line + "'");
    values.push_back(parse_double(line.substr(c1 + 1, c2 - c1 - 1)));
    derivatives.push_back(parse_double(line.substr(c2 + 1)));
  }
  if (static_cast<int>(values.size()) != node_count)
    raise(ErrorKind::io, module, "profile cache format",
          "header announces " + std::to_string(node_count) + " rows, found " +
              std::to_string(values.size()));
  RadialProfile profile(Dimension(dim), p, s_max, std::move(values), std::move(derivatives),
                        amplitude, s_m, defect);
  if (std::abs(profile.theta() - theta) > 1e-12 * theta)
    raise(ErrorKind::io, module, "profile cache integrity",
          "recomputed tail constant disagrees with the stored one");
  return profile;
}

}  // namespace multipeak
