#include "multipeak/closed_forms.hpp"

#include <cmath>
#include <string>

#include "multipeak/errors.hpp"

namespace multipeak {

namespace {

constexpr double asymptotic_seam = 25.0;

// exp(t) K_nu(t) from the integral over s of exp(-t (cosh s - 1)) cosh(nu s),
// by trapezoid refinement. The integrand is even and decays doubly
// exponentially, so the trapezoid sum converges geometrically.
double scaled_bessel_k_integral(double nu, double t) {
  const double cutoff = std::acosh(1.0 + (60.0 + 2.0 * nu * 30.0) / t);
  auto f = [&](double s) {
    return std::exp(-t * (std::cosh(s) - 1.0)) * std::cosh(nu * s);
  };
  int intervals = 16;
  double h = cutoff / intervals;
  double sum = 0.5 * f(0.0);
  for (int i = 1; i < intervals; ++i) sum += f(i * h);
  double estimate = h * sum;
  for (int level = 0; level < 18; ++level) {
    double odd = 0.0;
    for (int i = 1; i < 2 * intervals; i += 2) odd += f(i * 0.5 * h);
    sum += odd;
    intervals *= 2;
    h *= 0.5;
    const double refined = h * sum;
    if (level >= 2 && std::abs(refined - estimate) <= 1e-15 * refined)
      return refined;
    estimate = refined;
  }
  raise(ErrorKind::tolerance, "closed_forms", "integral representation of K",
        "trapezoid refinement did not converge at t = " + std::to_string(t));
}

// exp(t) K_nu(t) from the large argument series, summed until the terms
// stop decreasing.
double scaled_bessel_k_asymptotic(double nu, double t) {
  const double mu = 4.0 * nu * nu;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 60; ++k) {
    const double next = term * (mu - (2.0 * k - 1) * (2.0 * k - 1)) / (k * 8.0 * t);
    if (std::abs(next) >= std::abs(term) && k > 1) break;
    term = next;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return std::sqrt(pi / (2.0 * t)) * sum;
}

}  // namespace

Dimension::Dimension(int value) : value_(value) {
  if (value != 2 && value != 3)
    raise(ErrorKind::domain, "closed_forms", "dimension N in {2, 3}",
          "got N = " + std::to_string(value));
}

double norm(const Point& x, Dimension dim) {
  double s = x[0] * x[0] + x[1] * x[1];
  if (!dim.is_two()) s += x[2] * x[2];
  return std::sqrt(s);
}

Point operator-(const Point& a, const Point& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

Point operator+(const Point& a, const Point& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}

double scaled_bessel_k(double order, double t) {
  if (order != 0.0 && order != 0.5 && order != 1.0)
    raise(ErrorKind::domain, "closed_forms", "Bessel order in {0, 1/2, 1}",
          "got order " + std::to_string(order));
  if (!(t > 0.0))
    raise(ErrorKind::domain, "closed_forms", "Bessel argument t > 0",
          "got t = " + std::to_string(t));
  return t > asymptotic_seam ? scaled_bessel_k_asymptotic(order, t)
                             : scaled_bessel_k_integral(order, t);
}

double bessel_k(double order, double t) { return scaled_bessel_k(order, t) * std::exp(-t); }

GreensEvaluator::GreensEvaluator(double lambda, Dimension dim)
    : lambda_(lambda), sqrt_lambda_(std::sqrt(lambda)), dim_(dim) {
  if (!(lambda > 0.0))
    raise(ErrorKind::domain, "closed_forms", "spectral shift lambda > 0",
          "got lambda = " + std::to_string(lambda));
}

double GreensEvaluator::radial(double radius) const {
  if (!(radius > 0.0))
    raise(ErrorKind::singularity, "closed_forms",
          "Green's function is singular at the origin",
          "evaluation at |x| = " + std::to_string(radius));
  if (dim_.is_two()) return bessel_k(0.0, sqrt_lambda_ * radius) / (2.0 * pi);
  return std::exp(-sqrt_lambda_ * radius) / (4.0 * pi * radius);
}

double GreensEvaluator::radial_derivative(double radius) const {
  if (!(radius > 0.0))
    raise(ErrorKind::singularity, "closed_forms",
          "Green's function is singular at the origin",
          "evaluation at |x| = " + std::to_string(radius));
  if (dim_.is_two())
    return -sqrt_lambda_ * bessel_k(1.0, sqrt_lambda_ * radius) / (2.0 * pi);
  return -std::exp(-sqrt_lambda_ * radius) * (sqrt_lambda_ * radius + 1.0) /
         (4.0 * pi * radius * radius);
}

double GreensEvaluator::operator()(const Point& x) const {
  return radial(norm(x, dim_));
}

CouplingParams CouplingParams::for_reduction(double eta, Dimension dim) {
  if (!(eta > 0.0))
    raise(ErrorKind::domain, "closed_forms", "coupling eta > 0",
          "got eta = " + std::to_string(eta));
  CouplingParams c{eta, dim};
  if (!(beta(c, 1.0) > 0.0))
    raise(ErrorKind::domain, "closed_forms", "beta_eta(1) > 0",
          "eta = " + std::to_string(eta) + " gives beta(1) = " +
              std::to_string(beta(c, 1.0)));
  return c;
}

double beta(const CouplingParams& c, double lambda) {
  if (!(lambda > 0.0))
    raise(ErrorKind::domain, "closed_forms", "spectral parameter lambda > 0",
          "got lambda = " + std::to_string(lambda));
  if (c.dim.is_two())
    return c.alpha + (euler_gamma - std::log(2.0)) / (2.0 * pi) +
           std::log(std::sqrt(lambda)) / (2.0 * pi);
  return c.alpha + std::sqrt(lambda) / (4.0 * pi);
}

std::optional<double> bound_state_energy(const CouplingParams& c) {
  if (c.dim.is_two()) return -4.0 * std::exp(-2.0 * euler_gamma - 4.0 * pi * c.alpha);
  if (c.alpha < 0.0) {
    const double a = 4.0 * pi * c.alpha;
    return -a * a;
  }
  return std::nullopt;
}

double p_star() { return (9.0 + std::sqrt(113.0)) / 8.0; }

bool p_star_threshold(double p) {
  if (!(p > 2.0 && p <= 3.0))
    raise(ErrorKind::domain, "closed_forms", "exponent 2 < p <= 3",
          "got p = " + std::to_string(p));
  const double inv_conjugate = (p - 1.0) / p;
  return 2.0 * (2.0 * (p - 2.0) + inv_conjugate) > 3.0;
}

double ell(int peak_count) {
  if (peak_count < 2)
    raise(ErrorKind::domain, "closed_forms", "peak count K >= 2",
          "got K = " + std::to_string(peak_count));
  const double angle = 4.0 * pi / peak_count;
  return 3.0 * std::hypot(std::cos(angle) - 1.0, std::sin(angle));
}

double green_far_field_prefactor(Dimension dim) {
  return dim.is_two() ? 1.0 / (2.0 * std::sqrt(2.0 * pi)) : 1.0 / (4.0 * pi);
}

double unit_sphere_area(Dimension dim) { return dim.is_two() ? 2.0 * pi : 4.0 * pi; }

}  // namespace multipeak
