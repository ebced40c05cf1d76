#include "multipeak/field_space.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>
#include <string>

#include "multipeak/errors.hpp"
#include "multipeak/quadrature.hpp"

namespace multipeak {

namespace {

const char* const module = "field_space";

std::mutex& planner_mutex() {
  static std::mutex mutex;
  return mutex;
}

CellRule make_cell_rule(const GridSpec& grid) {
  const double a = 0.5 * grid.spacing();
  const bool two = grid.dim.is_two();
  const int power = two ? 3 : 12;
  const GaussRule& radial = gauss_legendre(64);
  const GaussRule& face = gauss_legendre(16);
  CellRule rule;
  auto add_ray = [&](double length, double face_weight) {
    for (std::size_t k = 0; k < radial.nodes.size(); ++k) {
      const double tau = 0.5 * (radial.nodes[k] + 1.0);
      const double t = std::pow(tau, power);
      const double dt = power * std::pow(tau, power - 1) * 0.5 * radial.weights[k];
      const double jacobian = two ? a * t : a * t * t;
      rule.radii.push_back(t * length);
      rule.weights.push_back(face_weight * jacobian * dt);
    }
  };
  for (std::size_t i = 0; i < face.nodes.size(); ++i) {
    const double b = 0.5 * a * (face.nodes[i] + 1.0);
    const double wb = 0.5 * a * face.weights[i];
    if (two) {
      add_ray(std::hypot(a, b), 8.0 * wb);
      continue;
    }
    for (std::size_t j = 0; j < face.nodes.size(); ++j) {
      const double c = 0.5 * a * (face.nodes[j] + 1.0);
      const double wc = 0.5 * a * face.weights[j];
      add_ray(std::sqrt(a * a + b * b + c * c), 24.0 * wb * wc);
    }
  }
  const GreensEvaluator green(1.0, grid.dim);
  rule.green.reserve(rule.radii.size());
  for (double r : rule.radii) rule.green.push_back(green.radial(r));
  return rule;
}

struct PairSample {
  Field values;
  double green_moment;
  double integral;
};

// F(u, v) at nodes for u = phi_u + q_u G, v = phi_v + q_v G. The origin cell
// is integrated with the cell rule, phi_u and phi_v frozen at the origin.
template <typename F>
PairSample sample_pair(const FieldSpace& space, std::span<const double> phi_u, double q_u,
                       std::span<const double> phi_v, double q_v, F&& f) {
  const std::size_t n = space.size();
  const std::size_t origin = space.grid().origin();
  const Field& g = space.green();
  const bool has_v = !phi_v.empty();
  PairSample out{Field(n), 0.0, 0.0};
  double moment = 0.0;
  double integral = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (j == origin) continue;
    const double u = phi_u[j] + q_u * g[j];
    const double v = has_v ? phi_v[j] + q_v * g[j] : 0.0;
    const double value = f(u, v);
    out.values[j] = value;
    moment += g[j] * value;
    integral += value;
  }
  const double volume = space.cell_volume();
  const CellRule& rule = space.cell_rule();
  double local = 0.0;
  double local_moment = 0.0;
  const double u0 = phi_u[origin];
  const double v0 = has_v ? phi_v[origin] : 0.0;
  for (std::size_t i = 0; i < rule.radii.size(); ++i) {
    const double value = f(u0 + q_u * rule.green[i], v0 + q_v * rule.green[i]);
    local += rule.weights[i] * value;
    local_moment += rule.weights[i] * rule.green[i] * value;
  }
  out.values[origin] = local / space.cell_volume();
  out.green_moment = volume * moment + local_moment;
  out.integral = volume * integral + local;
  return out;
}

std::string format_double(double x) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, x);
  return std::string(buffer, result.ptr);
}

}  // namespace

std::size_t GridSpec::size() const noexcept {
  std::size_t s = 1;
  for (int d = 0; d < dim.value(); ++d) s *= static_cast<std::size_t>(interior());
  return s;
}

std::size_t GridSpec::origin() const noexcept {
  const std::size_t n = interior();
  const std::size_t o = nodes_per_axis / 2 - 1;
  return dim.is_two() ? o * n + o : (o * n + o) * n + o;
}

Point GridSpec::coordinate(std::size_t flat) const noexcept {
  const std::size_t n = interior();
  const double h = spacing();
  Point x{0.0, 0.0, 0.0};
  for (int d = dim.value() - 1; d >= 0; --d) {
    x[d] = -half_width + static_cast<double>(flat % n + 1) * h;
    flat /= n;
  }
  return x;
}

void GridSpec::validate() const {
  if (nodes_per_axis < 16 || !std::has_single_bit(static_cast<unsigned>(nodes_per_axis)))
    raise(ErrorKind::configuration, module, "nodes per axis a power of two >= 16",
          "got M = " + std::to_string(nodes_per_axis));
  if (!(half_width > 0.0))
    raise(ErrorKind::configuration, module, "positive box half-width",
          "got L = " + std::to_string(half_width));
}

struct FieldSpace::Plan {
  fftw_plan handle = nullptr;
};

FieldSpace::FieldSpace(GridSpec grid, double eta)
    : grid_(grid), eta_(eta), plan_(std::make_unique<Plan>()) {
  grid_.validate();
  beta_one_ = multipeak::beta_one(CouplingParams::for_reduction(eta, grid_.dim));
  const int dims = grid_.dim.value();
  const int n = grid_.interior();
  const double h = grid_.spacing();
  const double two_m = 2.0 * grid_.nodes_per_axis;
  modal_scale_ = std::pow(h / two_m, dims);
  inverse_normalization_ = 1.0 / std::pow(two_m, dims);

  const std::size_t size = grid_.size();
  symbol_.resize(size);
  std::vector<double> kappa2(n);
  for (int k = 0; k < n; ++k) {
    const double kappa = pi * (k + 1) / (2.0 * grid_.half_width);
    kappa2[k] = kappa * kappa;
  }
  for (std::size_t j = 0; j < size; ++j) {
    std::size_t rest = j;
    double w = 1.0;
    for (int d = 0; d < dims; ++d) {
      w += kappa2[rest % n];
      rest /= n;
    }
    symbol_[j] = w;
  }

  cell_rule_ = make_cell_rule(grid_);
  double cell_green = 0.0;
  for (std::size_t i = 0; i < cell_rule_.radii.size(); ++i)
    cell_green += cell_rule_.weights[i] * cell_rule_.green[i];
  const GreensEvaluator green(1.0, grid_.dim);
  green_ = sample_radial({0.0, 0.0, 0.0}, [&](double r) {
    return r > 0.0 ? green.radial(r) : 0.0;
  });
  green_[grid_.origin()] = cell_green / cell_volume();

  Field in(size);
  Field out(size);
  std::vector<int> extents(dims, n);
  std::vector<fftw_r2r_kind> kinds(dims, FFTW_RODFT00);
  std::lock_guard lock(planner_mutex());
  plan_->handle = fftw_plan_r2r(dims, extents.data(), in.data(), out.data(), kinds.data(),
                                FFTW_MEASURE);
  if (!plan_->handle)
    raise(ErrorKind::configuration, module, "sine transform plan", "FFTW planning failed");
}

FieldSpace::~FieldSpace() {
  if (plan_ && plan_->handle) {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_->handle);
  }
}

std::shared_ptr<const FieldSpace> FieldSpace::create(GridSpec grid, double eta) {
  return std::make_shared<const FieldSpace>(grid, eta);
}

void FieldSpace::transform(const double* in, double* out) const {
  // New-array execution requires buffers aligned like the planning buffers;
  // Field guarantees that, spans of foreign memory are copied first.
  const bool aligned = fftw_alignment_of(const_cast<double*>(in)) == 0 &&
                       fftw_alignment_of(out) == 0;
  if (aligned) {
    fftw_execute_r2r(plan_->handle, const_cast<double*>(in), out);
    return;
  }
  Field a(in, in + size());
  Field b(size());
  fftw_execute_r2r(plan_->handle, a.data(), b.data());
  std::copy(b.begin(), b.end(), out);
}

Field FieldSpace::to_modal(std::span<const double> samples) const {
  if (samples.size() != size())
    raise(ErrorKind::incompatible, module, "field matches the grid", "sample count mismatch");
  Field out(size());
  transform(samples.data(), out.data());
  return out;
}

Field FieldSpace::to_physical(std::span<const double> modal) const {
  if (modal.size() != size())
    raise(ErrorKind::incompatible, module, "field matches the grid", "mode count mismatch");
  Field out(size());
  transform(modal.data(), out.data());
  for (double& x : out) x *= inverse_normalization_;
  return out;
}

double FieldSpace::modal_inner(std::span<const double> a, std::span<const double> b) const {
  double sum = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) sum += symbol_[j] * a[j] * b[j];
  return modal_scale_ * sum;
}

double FieldSpace::quadrature(std::span<const double> samples) const {
  double sum = 0.0;
  for (double x : samples) sum += x;
  return cell_volume() * sum;
}

double FieldSpace::cell_volume() const noexcept {
  return std::pow(grid_.spacing(), grid_.dim.value());
}

Field FieldSpace::helmholtz_inverse(std::span<const double> source) const {
  Field modal = to_modal(source);
  for (std::size_t j = 0; j < modal.size(); ++j) modal[j] /= symbol_[j];
  return to_physical(modal);
}

Field FieldSpace::helmholtz_apply(std::span<const double> samples) const {
  Field modal = to_modal(samples);
  for (std::size_t j = 0; j < modal.size(); ++j) modal[j] *= symbol_[j];
  return to_physical(modal);
}

Field FieldSpace::sample_radial(const Point& center,
                                const std::function<double(double)>& f) const {
  Field out(size());
  const Dimension dim = grid_.dim;
  for (std::size_t j = 0; j < out.size(); ++j)
    out[j] = f(norm(grid_.coordinate(j) - center, dim));
  return out;
}

EtaFunction::EtaFunction(std::shared_ptr<const FieldSpace> space, Field phi, double q)
    : space_(std::move(space)), phi_(std::move(phi)), q_(q) {
  if (!space_)
    raise(ErrorKind::incompatible, module, "function attached to a field space", "null space");
  if (phi_.size() != space_->size())
    raise(ErrorKind::incompatible, module, "field matches the grid",
          "got " + std::to_string(phi_.size()) + " samples for " +
              std::to_string(space_->size()) + " nodes");
}

EtaFunction EtaFunction::zero(std::shared_ptr<const FieldSpace> space) {
  const std::size_t n = space->size();
  return EtaFunction(std::move(space), Field(n, 0.0), 0.0);
}

EtaFunction& EtaFunction::operator+=(const EtaFunction& other) {
  require_compatible(*this, other);
  for (std::size_t j = 0; j < phi_.size(); ++j) phi_[j] += other.phi_[j];
  q_ += other.q_;
  return *this;
}

EtaFunction& EtaFunction::operator-=(const EtaFunction& other) {
  require_compatible(*this, other);
  for (std::size_t j = 0; j < phi_.size(); ++j) phi_[j] -= other.phi_[j];
  q_ -= other.q_;
  return *this;
}

EtaFunction& EtaFunction::operator*=(double factor) {
  for (double& x : phi_) x *= factor;
  q_ *= factor;
  return *this;
}

EtaFunction operator+(EtaFunction a, const EtaFunction& b) { return a += b; }
EtaFunction operator-(EtaFunction a, const EtaFunction& b) { return a -= b; }
EtaFunction operator*(double factor, EtaFunction a) { return a *= factor; }

void require_compatible(const EtaFunction& a, const EtaFunction& b) {
  if (a.space_ptr() == b.space_ptr()) return;
  if (!(a.space().grid() == b.space().grid()) || a.space().eta() != b.space().eta())
    raise(ErrorKind::incompatible, module, "functions share grid and coupling",
          "grid or eta differ");
}

double inner_product(const EtaFunction& u1, const EtaFunction& u2) {
  require_compatible(u1, u2);
  const FieldSpace& space = u1.space();
  const Field a = space.to_modal(u1.phi());
  const Field b = &u1 == &u2 ? a : space.to_modal(u2.phi());
  return space.modal_inner(a, b) + space.beta_one() * u1.q() * u2.q();
}

double norm(const EtaFunction& u) { return std::sqrt(inner_product(u, u)); }

namespace {

void check_exponent(const EtaFunction& u, double p) {
  const bool two = u.space().grid().dim.is_two();
  if (!(p > 2.0) || (two ? p > 3.0 : p >= 3.0))
    raise(ErrorKind::domain, module,
          "exponent 2 < p <= 3 (N = 2) or 2 < p < 3 (N = 3); |G|^p integrable",
          "got p = " + std::to_string(p));
}

}  // namespace

NonlinearSample sample_nonlinear(const FieldSpace& space, std::span<const double> phi,
                                 double q, const std::function<double(double)>& f) {
  PairSample s = sample_pair(space, phi, q, {}, 0.0, [&](double u, double) { return f(u); });
  return {std::move(s.values), s.green_moment, s.integral};
}

double action(const EtaFunction& u, double p) {
  check_exponent(u, p);
  const PairSample s = sample_pair(u.space(), u.phi(), u.q(), {}, 0.0,
                                   [p](double x, double) { return std::pow(std::abs(x), p); });
  return 0.5 * inner_product(u, u) - s.integral / p;
}

EtaFunction gradient(const EtaFunction& u, double p) {
  check_exponent(u, p);
  const FieldSpace& space = u.space();
  const PairSample s = sample_pair(space, u.phi(), u.q(), {}, 0.0, [p](double x, double) {
    return std::pow(std::abs(x), p - 2.0) * x;
  });
  Field phi = space.helmholtz_inverse(s.values);
  for (std::size_t j = 0; j < phi.size(); ++j) phi[j] = u.phi()[j] - phi[j];
  return EtaFunction(u.space_ptr(), std::move(phi), u.q() - s.green_moment / space.beta_one());
}

EtaFunction hessian_apply(const EtaFunction& u, const EtaFunction& v, double p) {
  require_compatible(u, v);
  check_exponent(u, p);
  const FieldSpace& space = u.space();
  const PairSample s =
      sample_pair(space, u.phi(), u.q(), v.phi(), v.q(), [p](double x, double y) {
        return x == 0.0 ? 0.0 : (p - 1.0) * std::pow(std::abs(x), p - 2.0) * y;
      });
  Field phi = space.helmholtz_inverse(s.values);
  for (std::size_t j = 0; j < phi.size(); ++j) phi[j] = v.phi()[j] - phi[j];
  return EtaFunction(u.space_ptr(), std::move(phi), v.q() - s.green_moment / space.beta_one());
}

double lp_norm(const EtaFunction& u, double r) {
  const bool two = u.space().grid().dim.is_two();
  if (!(r >= 2.0) || !std::isfinite(r) || (!two && r >= 3.0))
    raise(ErrorKind::domain, module,
          "Lebesgue exponent 2 <= r < infinity (N = 2) or 2 <= r < 3 (N = 3)",
          "got r = " + std::to_string(r));
  const PairSample s = sample_pair(u.space(), u.phi(), u.q(), {}, 0.0,
                                   [r](double x, double) { return std::pow(std::abs(x), r); });
  return std::pow(s.integral, 1.0 / r);
}

double truncation_defect(const EtaFunction& u) {
  const GridSpec& grid = u.space().grid();
  const std::size_t n = grid.interior();
  const int dims = grid.dim.value();
  double peak = 0.0;
  double edge = 0.0;
  for (std::size_t j = 0; j < u.phi().size(); ++j) {
    const double a = std::abs(u.phi()[j]);
    peak = std::max(peak, a);
    std::size_t rest = j;
    bool boundary = false;
    for (int d = 0; d < dims; ++d) {
      const std::size_t i = rest % n;
      boundary = boundary || i == 0 || i == n - 1;
      rest /= n;
    }
    if (boundary) edge = std::max(edge, a);
  }
  return peak > 0.0 ? edge / peak : 0.0;
}

void save_snapshot(const EtaFunction& u, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorKind::io, module, "writable snapshot", "cannot open " + path.string());
  const GridSpec& grid = u.space().grid();
  out << grid.dim.value() << ' ' << grid.nodes_per_axis << ' ' << format_double(grid.half_width)
      << ' ' << format_double(u.space().eta()) << ' ' << format_double(u.q()) << '\n';
  out.write(reinterpret_cast<const char*>(u.phi().data()),
            static_cast<std::streamsize>(u.phi().size() * sizeof(double)));
  if (!out) raise(ErrorKind::io, module, "writable snapshot", "write failed");
}

EtaFunction load_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorKind::io, module, "readable snapshot", "cannot open " + path.string());
  std::string header;
  std::getline(in, header);
  std::istringstream fields(header);
  int dim = 0;
  int m = 0;
  std::string l_text, eta_text, q_text;
  if (!(fields >> dim >> m >> l_text >> eta_text >> q_text))
    raise(ErrorKind::io, module, "snapshot header 'dim M L eta q'", "malformed header");
  auto parse = [](const std::string& t) {
    double v = 0.0;
    const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
    if (r.ec != std::errc())
      raise(ErrorKind::io, module, "snapshot header 'dim M L eta q'", "bad number " + t);
    return v;
  };
  GridSpec grid{Dimension(dim), parse(l_text), m};
  auto space = FieldSpace::create(grid, parse(eta_text));
  Field phi(space->size());
  in.read(reinterpret_cast<char*>(phi.data()),
          static_cast<std::streamsize>(phi.size() * sizeof(double)));
  if (in.gcount() != static_cast<std::streamsize>(phi.size() * sizeof(double)))
    raise(ErrorKind::io, module, "snapshot payload", "truncated sample array");
  return EtaFunction(std::move(space), std::move(phi), parse(q_text));
}

}  // namespace multipeak
