#include "multipeak/ansatz.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <string>

#include <boost/math/tools/roots.hpp>

#include "multipeak/errors.hpp"

namespace multipeak {

namespace {

const char* const module = "ansatz";

// (1 + t)^p - 1 - p t for |t| < 1/2.
double second_order_rest(double t, double p) {
  if (std::abs(t) < 0.05) {
    double term = 0.5 * p * (p - 1.0) * t * t;
    double sum = term;
    for (int k = 3; k < 16; ++k) {
      term *= (p - k + 1.0) / k * t;
      sum += term;
    }
    return sum;
  }
  return std::expm1(p * std::log1p(t)) - p * t;
}

struct PointTerms {
  double source;
  double excess;
};

// Contributions at one point with the largest peak `lead`, the remaining
// peaks (value, source, power) and the perturbation `shift` = nu + Q G.
PointTerms point_terms(double p, double lead, double rest, double rest_source,
                       double rest_power, double shift) {
  const double b = rest + shift;
  const double a_abs = std::abs(lead);
  const double f_lead = std::pow(a_abs, p - 2.0) * lead;
  const double t = b / lead;
  double df;
  double second;
  if (std::abs(t) < 0.5) {
    df = f_lead * std::expm1((p - 1.0) * std::log1p(t));
    second = std::pow(a_abs, p) * second_order_rest(t, p);
  } else {
    const double u = lead + b;
    const double f_u = std::pow(std::abs(u), p - 2.0) * u;
    df = f_u - f_lead;
    second = std::pow(std::abs(u), p) - std::pow(a_abs, p) - p * f_lead * b;
  }
  return {df - rest_source,
          second + p * f_lead * rest - rest_power - p * rest_source * shift};
}

}  // namespace

SignPattern::SignPattern(std::vector<int> deltas) : deltas_(std::move(deltas)) {
  if (deltas_.size() < 2)
    raise(ErrorKind::validation, module, "at least two peaks",
          "got K = " + std::to_string(deltas_.size()));
  for (int d : deltas_)
    if (d != 1 && d != -1)
      raise(ErrorKind::validation, module, "signs in {-1, +1}", "got " + std::to_string(d));
  const int sum = cyclic_sum();
  if (sum >= 0)
    raise(ErrorKind::validation, module, "negative cyclic sign correlation",
          "cyclic sum of neighbouring sign products is " + std::to_string(sum));
}

SignPattern SignPattern::alternating(int peak_count) {
  std::vector<int> deltas(static_cast<std::size_t>(std::max(peak_count, 0)));
  for (std::size_t k = 0; k < deltas.size(); ++k) deltas[k] = k % 2 == 0 ? 1 : -1;
  return SignPattern(std::move(deltas));
}

int SignPattern::cyclic_sum() const noexcept {
  int sum = 0;
  const std::size_t k_max = deltas_.size();
  for (std::size_t k = 0; k < k_max; ++k) sum += deltas_[k] * deltas_[(k + 1) % k_max];
  return sum;
}

double pair_coupling(const SignPattern& pattern) {
  if (pattern.size() == 2) return -static_cast<double>(pattern[0] * pattern[1]);
  return -static_cast<double>(pattern.cyclic_sum());
}

double chi(const SignPattern& pattern, double p) {
  if (!(p > 2.0 && p < 4.0))
    raise(ErrorKind::domain, module, "exponent 2 < p < 4", "got p = " + std::to_string(p));
  return (4.0 - p) / (2.0 * p) * pair_coupling(pattern);
}

std::vector<Point> polygon_vertices(int peak_count, double r, Dimension dim) {
  if (peak_count < 2)
    raise(ErrorKind::validation, module, "at least two peaks",
          "got K = " + std::to_string(peak_count));
  if (!(r > 0.0))
    raise(ErrorKind::domain, module, "positive peak distance", "got r = " + std::to_string(r));
  const double radius = 3.0 * r / (2.0 * std::sin(pi / peak_count));
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(peak_count));
  for (int k = 1; k <= peak_count; ++k) {
    const std::complex<double> z =
        radius * (std::polar(1.0, 2.0 * pi * k / peak_count) - 1.0) - r;
    out.push_back({z.real(), z.imag(), 0.0});
  }
  // The last vertex is exactly (-r, 0); avoid rounding in e^{2 pi i} - 1.
  out.back() = {-r, 0.0, 0.0};
  (void)dim;
  return out;
}

void PeakConfiguration::validate() const {
  const bool two = dim.is_two();
  if (!(p > 2.0) || (two ? p > 3.0 : p >= 3.0))
    raise(ErrorKind::configuration, module, "exponent 2 < p <= 3 (N = 2) or 2 < p < 3 (N = 3)",
          "got p = " + std::to_string(p));
  if (!(r > 0.0))
    raise(ErrorKind::configuration, module, "positive peak distance",
          "got r = " + std::to_string(r));
  if (!std::isfinite(eta))
    raise(ErrorKind::configuration, module, "finite coupling", "got eta = " + std::to_string(eta));
}

void require_inside(const GridSpec& grid, std::span<const Point> points) {
  for (const Point& y : points) {
    double extent = 0.0;
    for (int d = 0; d < grid.dim.value(); ++d) extent = std::max(extent, std::abs(y[d]));
    if (extent + peak_margin > grid.half_width)
      raise(ErrorKind::geometry, module, "peaks at least 12 decay lengths inside the box",
            "peak at distance " + std::to_string(extent) + " from the centre, box half-width " +
                std::to_string(grid.half_width));
  }
}

namespace {

void require_eta(const FieldSpace& space, double eta) {
  if (space.eta() != eta)
    raise(ErrorKind::incompatible, module, "field space built for the same coupling",
          "space eta " + std::to_string(space.eta()) + ", requested " + std::to_string(eta));
}

}  // namespace

EtaFunction building_block(double eta, const Point& y, const RadialProfile& profile,
                           std::shared_ptr<const FieldSpace> space) {
  require_eta(*space, eta);
  const Dimension dim = space->grid().dim;
  if (profile.dim() != dim)
    raise(ErrorKind::incompatible, module, "profile and grid of equal dimension",
          "dimension mismatch");
  const double distance = norm(y, dim);
  if (!(distance > 0.0))
    raise(ErrorKind::geometry, module, "peak away from the interaction point",
          "peak placed at the origin");
  require_inside(space->grid(), std::span(&y, 1));
  Field phi = space->sample_radial(y, [&](double s) { return profile.value(s); });
  const double q = profile.value(distance) / space->beta_one();
  return EtaFunction(std::move(space), std::move(phi), q);
}

EtaFunction pseudo_critical(const PeakConfiguration& config, const RadialProfile& profile,
                            std::shared_ptr<const FieldSpace> space) {
  return PeakField(config, profile, std::move(space)).superposition();
}

double admissibility_ratio(const RadialProfile& profile, double r) {
  const double phi = profile.value(r);
  return phi * phi / interaction_integral(profile, 3.0 * r);
}

AdmissibleInterval admissible_interval(double eta, double c, double chi_value,
                                       const RadialProfile& profile) {
  if (!(eta > std::exp(1.0)))
    raise(ErrorKind::domain, module, "coupling eta > e", "got eta = " + std::to_string(eta));
  if (!(c > 4.0 * chi_value))
    raise(ErrorKind::validation, module, "interval constant c > 4 chi",
          "c = " + std::to_string(c) + ", chi = " + std::to_string(chi_value));
  const double lower = eta / std::log(eta);
  const double upper = c * eta;

  // Coarse monotone scan over the radii where I(3r) is resolved.
  const double r_first = 0.5;
  const double r_last = 2.0 * profile.s_max() / 3.0;
  const double step = 0.5;
  std::vector<double> radii;
  std::vector<double> ratios;
  for (double r = r_first; r <= r_last; r += step) {
    radii.push_back(r);
    ratios.push_back(admissibility_ratio(profile, r));
    if (ratios.size() > 1 && !(ratios.back() > ratios[ratios.size() - 2]))
      raise(ErrorKind::range, module, "Phi(r)^2 / I(3r) increasing in r",
            "decrease near r = " + std::to_string(r));
    if (ratios.back() > upper) break;
  }
  auto crossing = [&](double target) {
    const auto it = std::find_if(ratios.begin(), ratios.end(), [&](double v) { return v > target; });
    if (it == ratios.begin() || it == ratios.end())
      raise(ErrorKind::range, module, "admissible radii inside the profile support",
            "Phi(r)^2 / I(3r) = " + std::to_string(target) + " not reached on [" +
                std::to_string(r_first) + ", " + std::to_string(r_last) + "]");
    const auto i = static_cast<std::size_t>(it - ratios.begin());
    const double log_target = std::log(target);
    auto gap = [&](double r) { return std::log(admissibility_ratio(profile, r)) - log_target; };
    std::uintmax_t iterations = 60;
    const auto [lo, hi] = boost::math::tools::toms748_solve(
        gap, radii[i - 1], radii[i], std::log(ratios[i - 1]) - log_target,
        std::log(ratios[i]) - log_target,
        [](double a, double b) { return std::abs(b - a) <= 1e-10; }, iterations);
    return 0.5 * (lo + hi);
  };
  return {crossing(lower), crossing(upper), c};
}

double residual_norm(const EtaFunction& w, double p) { return norm(gradient(w, p)); }

double residual_scale(Dimension dim, double p, double r, double eta) {
  const double n = dim.value();
  const double conjugate = p / (p - 1.0);
  const double r_power = ((3.0 - p) * n + p - 1.0) / (2.0 * conjugate);
  const double eta_power = std::min(3.0 / conjugate, 2.0 * (p - 2.0) + 1.0 / conjugate);
  return std::pow(r, r_power) * std::pow(eta, -eta_power);
}

PeakField::PeakField(const PeakConfiguration& config, const RadialProfile& profile,
                     std::shared_ptr<const FieldSpace> space)
    : config_(config), space_(std::move(space)) {
  config_.validate();
  require_eta(*space_, config_.eta);
  const GridSpec& grid = space_->grid();
  if (profile.dim() != grid.dim || profile.dim() != config_.dim)
    raise(ErrorKind::incompatible, module, "profile, grid and configuration of equal dimension",
          "dimension mismatch");
  if (profile.p() != config_.p)
    raise(ErrorKind::incompatible, module, "profile for the configured exponent",
          "profile p = " + std::to_string(profile.p()) + ", configured " +
              std::to_string(config_.p));
  vertices_ = config_.vertices();
  require_inside(grid, vertices_);

  const int k_max = config_.peak_count();
  const double p = config_.p;
  const Dimension dim = grid.dim;
  vertex_sum_ = 0.0;
  pair_energy_ = 0.0;
  for (int k = 0; k < k_max; ++k) {
    vertex_sum_ += config_.pattern[k] * profile.value(norm(vertices_[k], dim));
    for (int l = k + 1; l < k_max; ++l)
      pair_energy_ += config_.pattern[k] * config_.pattern[l] *
                      interaction_integral(profile, norm(vertices_[k] - vertices_[l], dim));
  }
  ground_action_ = ground_state_action(profile);

  const std::size_t n = space_->size();
  lead_.assign(n, 0.0);
  rest_value_.assign(n, 0.0);
  rest_source_.assign(n, 0.0);
  rest_power_.assign(n, 0.0);
  std::vector<double> values(static_cast<std::size_t>(k_max));
  for (std::size_t j = 0; j < n; ++j) {
    const Point x = grid.coordinate(j);
    int best = 0;
    for (int k = 0; k < k_max; ++k) {
      values[k] = profile.value(norm(x - vertices_[k], dim));
      if (values[k] > values[best]) best = k;
    }
    lead_[j] = config_.pattern[best] * values[best];
    double rest = 0.0, source = 0.0, power = 0.0;
    for (int k = 0; k < k_max; ++k) {
      if (k == best) continue;
      rest += config_.pattern[k] * values[k];
      source += config_.pattern[k] * std::pow(values[k], p - 1.0);
      power += std::pow(values[k], p);
    }
    rest_value_[j] = rest;
    rest_source_[j] = source;
    rest_power_[j] = power;
  }
}

EtaFunction PeakField::superposition() const { return EtaFunction(space_, peaks(), charge()); }

Field PeakField::peaks() const {
  Field out(lead_.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = lead_[j] + rest_value_[j];
  return out;
}

Remainder PeakField::remainder(std::span<const double> nu_phi, double nu_q) const {
  const std::size_t n = space_->size();
  if (nu_phi.size() != n)
    raise(ErrorKind::incompatible, module, "perturbation on the same grid", "size mismatch");
  const double p = config_.p;
  const double q = charge() + nu_q;
  const Field& green = space_->green();
  const std::size_t origin = space_->grid().origin();
  Remainder out{Field(n), 0.0, 0.0};
  double moment = 0.0;
  double excess = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (j == origin) continue;
    const PointTerms t = point_terms(p, lead_[j], rest_value_[j], rest_source_[j],
                                     rest_power_[j], nu_phi[j] + q * green[j]);
    out.source[j] = t.source;
    moment += green[j] * t.source;
    excess += t.excess;
  }
  const CellRule& rule = space_->cell_rule();
  double local = 0.0;
  double local_moment = 0.0;
  double local_excess = 0.0;
  for (std::size_t i = 0; i < rule.radii.size(); ++i) {
    const PointTerms t = point_terms(p, lead_[origin], rest_value_[origin], rest_source_[origin],
                                     rest_power_[origin], nu_phi[origin] + q * rule.green[i]);
    local += rule.weights[i] * t.source;
    local_moment += rule.weights[i] * rule.green[i] * t.source;
    local_excess += rule.weights[i] * t.excess;
  }
  const double volume = space_->cell_volume();
  out.source[origin] = local / volume;
  out.green_moment = volume * moment + local_moment;
  out.excess = volume * excess + local_excess;
  return out;
}

double PeakField::action_excess(const EtaFunction& nu) const {
  if (nu.space_ptr() != space_ &&
      (!(nu.space().grid() == space_->grid()) || nu.space().eta() != space_->eta()))
    raise(ErrorKind::incompatible, module, "perturbation on the same grid and coupling",
          "grid or eta differ");
  const Remainder rem = remainder(nu.phi(), nu.q());
  const double beta = space_->beta_one();
  return pair_energy_ - vertex_sum_ * vertex_sum_ / (2.0 * beta) +
         0.5 * inner_product(nu, nu) - rem.excess / config_.p;
}

double PeakField::action(const EtaFunction& nu) const {
  return config_.peak_count() * ground_action_ + action_excess(nu);
}

EtaFunction PeakField::gradient(const EtaFunction& nu) const {
  const Remainder rem = remainder(nu.phi(), nu.q());
  Field phi = space_->helmholtz_inverse(rem.source);
  for (std::size_t j = 0; j < phi.size(); ++j) phi[j] = nu.phi()[j] - phi[j];
  return EtaFunction(space_, std::move(phi), nu.q() - rem.green_moment / space_->beta_one());
}

double PeakField::residual_norm() const { return norm(gradient(EtaFunction::zero(space_))); }

}  // namespace multipeak
