#include "multipeak/rescaling.hpp"

#include <Eigen/Core>

#include <cmath>
#include <string>

#include "multipeak/errors.hpp"

namespace multipeak {

namespace {

const char* const module = "rescaling";

void require_positive_omega(double omega) {
  if (!(omega > 0.0) || !std::isfinite(omega))
    raise(ErrorKind::domain, module, "frequency omega > 0", "got omega = " + std::to_string(omega));
}

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace

void OmegaProblem::validate() const {
  require_positive_omega(omega);
  if (!(p > 2.0))
    raise(ErrorKind::domain, module, "exponent p > 2", "got p = " + std::to_string(p));
}

double OmegaProblem::charge_weight() const { return beta(CouplingParams{alpha, dim}, omega); }

double alpha_omega(double alpha, double omega, Dimension dim) {
  require_positive_omega(omega);
  if (dim.is_two()) return alpha + std::log(std::sqrt(omega)) / (2.0 * pi);
  return alpha / std::sqrt(omega);
}

double beta_consistency_check(double alpha, double omega, Dimension dim) {
  const double unit = beta(CouplingParams{alpha_omega(alpha, omega, dim), dim}, 1.0);
  const double scaled =
      std::pow(omega, -(dim.value() - 2) / 2.0) * beta(CouplingParams{alpha, dim}, omega);
  return std::abs(unit - scaled);
}

Field dilate(const FieldSpace& space, std::span<const double> phi, double s) {
  const GridSpec& grid = space.grid();
  const Eigen::Index n = grid.interior();
  const double h = grid.spacing();
  const double half_width = grid.half_width;
  RowMatrix axis(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = s * (-half_width + static_cast<double>(i + 1) * h);
    for (Eigen::Index k = 0; k < n; ++k) {
      const double kappa = pi * static_cast<double>(k + 1) / (2.0 * half_width);
      axis(i, k) = std::abs(x) < half_width
                       ? std::sin(kappa * (x + half_width)) / grid.nodes_per_axis
                       : 0.0;
    }
  }
  Field modal = space.to_modal(phi);
  Field out(modal.size());
  if (grid.dim.is_two()) {
    Eigen::Map<const RowMatrix> c(modal.data(), n, n);
    Eigen::Map<RowMatrix> result(out.data(), n, n);
    result.noalias() = axis * c * axis.transpose();
    return out;
  }
  // Three axes, fastest last: transform along each axis in turn.
  Eigen::Map<RowMatrix> slabs(modal.data(), n * n, n);
  RowMatrix step = slabs * axis.transpose();
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Map<RowMatrix> slice(step.data() + i * n * n, n, n);
    slice = (axis * slice).eval();
  }
  Eigen::Map<RowMatrix> columns(step.data(), n, n * n);
  Eigen::Map<RowMatrix> result(out.data(), n, n * n);
  result.noalias() = axis * columns;
  return out;
}

double spectral_tail(const FieldSpace& space, std::span<const double> phi) {
  const Field modal = space.to_modal(phi);
  const Field& symbol = space.symbol();
  const std::size_t n = static_cast<std::size_t>(space.grid().interior());
  const std::size_t cutoff = 3 * n / 4;
  const int dims = space.grid().dim.value();
  double total = 0.0;
  double tail = 0.0;
  for (std::size_t j = 0; j < modal.size(); ++j) {
    const double energy = symbol[j] * modal[j] * modal[j];
    total += energy;
    std::size_t rest = j;
    bool high = false;
    for (int d = 0; d < dims; ++d) {
      high = high || rest % n >= cutoff;
      rest /= n;
    }
    if (high) tail += energy;
  }
  return total > 0.0 ? std::sqrt(tail / total) : 0.0;
}

EtaFunction rescale_solution(const EtaFunction& u, double p, double omega, ScaleDirection direction,
                             double aliasing_tolerance) {
  require_positive_omega(omega);
  if (!(p > 2.0))
    raise(ErrorKind::domain, module, "exponent p > 2", "got p = " + std::to_string(p));
  if (omega == 1.0) return u;
  const FieldSpace& space = u.space();
  const int n = space.grid().dim.value();
  const double a = 1.0 / (p - 2.0);
  const double sign = direction == ScaleDirection::to_unit ? -1.0 : 1.0;
  const double s = std::pow(omega, 0.5 * sign);
  if (!(s >= 1.0 / max_dilation && s <= max_dilation))
    raise(ErrorKind::resolution, module, "dilation factor within [1/8, 8]",
          "omega = " + std::to_string(omega) + " needs factor " + std::to_string(s));
  Field phi = dilate(space, u.phi(), s);
  const double amplitude = std::pow(omega, sign * a);
  for (double& x : phi) x *= amplitude;
  const double tail = spectral_tail(space, phi);
  if (tail > aliasing_tolerance)
    raise(ErrorKind::resolution, module, "resampled field resolved by the grid",
          "top-quarter modal share " + std::to_string(tail) + " above " +
              std::to_string(aliasing_tolerance));
  const double q = u.q() * std::pow(omega, sign * (a - 0.5 * (n - 2)));
  return EtaFunction(u.space_ptr(), std::move(phi), q);
}

WeakResidual weak_form_residual(const EtaFunction& u, const OmegaProblem& problem) {
  problem.validate();
  const FieldSpace& space = u.space();
  if (!(space.grid().dim == problem.dim))
    raise(ErrorKind::incompatible, module, "field and problem of equal dimension",
          "dimension mismatch");
  const double weight = problem.charge_weight();
  if (!(weight > 0.0))
    raise(ErrorKind::domain, module, "positive charge weight beta_alpha(omega)",
          "got " + std::to_string(weight));
  const double p = problem.p;
  const double omega = problem.omega;
  const GreensEvaluator green(omega, problem.dim);
  const GridSpec& grid = space.grid();
  const std::size_t origin = grid.origin();
  const double volume = space.cell_volume();
  auto f = [p](double x) { return std::pow(std::abs(x), p - 2.0) * x; };

  const Field& phi = u.phi();
  const double q = u.q();
  Field source(phi.size());
  double moment = 0.0;
  for (std::size_t j = 0; j < phi.size(); ++j) {
    if (j == origin) continue;
    const double g = green(grid.coordinate(j));
    source[j] = f(phi[j] + q * g);
    moment += g * source[j];
  }
  const CellRule& rule = space.cell_rule();
  double local = 0.0;
  double local_moment = 0.0;
  for (std::size_t i = 0; i < rule.radii.size(); ++i) {
    const double g = green.radial(rule.radii[i]);
    const double value = f(phi[origin] + q * g);
    local += rule.weights[i] * value;
    local_moment += rule.weights[i] * g * value;
  }
  source[origin] = local / volume;
  moment = volume * moment + local_moment;

  const Field modal = space.to_modal(phi);
  const Field image = space.to_modal(source);
  const Field& symbol = space.symbol();
  const double scale = space.modal_scale();
  double residual = 0.0;
  double size = 0.0;
  for (std::size_t j = 0; j < modal.size(); ++j) {
    const double lambda = symbol[j] - 1.0 + omega;
    const double g = modal[j] - image[j] / lambda;
    residual += lambda * g * g;
    size += lambda * modal[j] * modal[j];
  }
  const double gq = q - moment / weight;
  const double absolute = std::sqrt(scale * residual + weight * gq * gq);
  const double norm_u = std::sqrt(scale * size + weight * q * q);
  return {absolute, norm_u > 0.0 ? absolute / norm_u : absolute};
}

}  // namespace multipeak
