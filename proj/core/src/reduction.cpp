#include "multipeak/reduction.hpp"

#include <Eigen/Core>
#include <boost/math/tools/minima.hpp>
#include <unsupported/Eigen/IterativeSolvers>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>

#include "multipeak/errors.hpp"

namespace multipeak {
namespace {

const char* const module = "reduction";

// Projected Hessian at W as a matrix-free operator for Eigen's MINRES.
class ProjectedHessian;

}  // namespace
}  // namespace multipeak

namespace Eigen::internal {
template <>
struct traits<multipeak::ProjectedHessian> : public traits<SparseMatrix<double>> {};
}  // namespace Eigen::internal

namespace multipeak {
namespace {

class ProjectedHessian : public Eigen::EigenBase<ProjectedHessian> {
 public:
  using Scalar = double;
  using RealScalar = double;
  using StorageIndex = int;
  enum { ColsAtCompileTime = Eigen::Dynamic, MaxColsAtCompileTime = Eigen::Dynamic, IsRowMajor = false };

  explicit ProjectedHessian(const ReductionWorkspace& ws) : ws_(&ws) {}
  Eigen::Index rows() const { return ws_->frame().dimension(); }
  Eigen::Index cols() const { return ws_->frame().dimension(); }

  template <typename Rhs>
  Eigen::Product<ProjectedHessian, Rhs, Eigen::AliasFreeProduct> operator*(
      const Eigen::MatrixBase<Rhs>& x) const {
    return Eigen::Product<ProjectedHessian, Rhs, Eigen::AliasFreeProduct>(*this, x.derived());
  }

  Eigen::VectorXd apply(const Eigen::VectorXd& y) const { return ws_->apply_projected_hessian(y); }

 private:
  const ReductionWorkspace* ws_;
};

}  // namespace
}  // namespace multipeak

namespace Eigen::internal {
template <typename Rhs>
struct generic_product_impl<multipeak::ProjectedHessian, Rhs, SparseShape, DenseShape, GemvProduct>
    : generic_product_impl_base<multipeak::ProjectedHessian, Rhs,
                                generic_product_impl<multipeak::ProjectedHessian, Rhs>> {
  using Scalar = typename Product<multipeak::ProjectedHessian, Rhs>::Scalar;
  template <typename Dest>
  static void scaleAndAddTo(Dest& dst, const multipeak::ProjectedHessian& lhs, const Rhs& rhs,
                            const Scalar& alpha) {
    dst.noalias() += alpha * lhs.apply(Eigen::VectorXd(rhs));
  }
};
}  // namespace Eigen::internal

namespace multipeak {

WeightedFrame::WeightedFrame(std::shared_ptr<const FieldSpace> space)
    : space_(std::move(space)), weights_(space_->size()),
      charge_weight_(std::sqrt(space_->beta_one())) {
  if (!(space_->beta_one() > 0.0))
    raise(ErrorKind::domain, module, "positive charge weight beta_eta(1)",
          "got " + std::to_string(space_->beta_one()));
  const double scale = space_->modal_scale();
  const Field& symbol = space_->symbol();
  for (std::size_t j = 0; j < weights_.size(); ++j) weights_[j] = std::sqrt(scale * symbol[j]);
}

void WeightedFrame::encode_modal(std::span<const double> modal,
                                 Eigen::Ref<Eigen::VectorXd> y) const {
  for (std::size_t j = 0; j < weights_.size(); ++j)
    y[static_cast<Eigen::Index>(j)] = weights_[j] * modal[j];
}

Field WeightedFrame::decode_modal(const Eigen::VectorXd& y) const {
  Field modal(weights_.size());
  for (std::size_t j = 0; j < modal.size(); ++j)
    modal[j] = y[static_cast<Eigen::Index>(j)] / weights_[j];
  return modal;
}

Eigen::VectorXd WeightedFrame::coordinates(const EtaFunction& u) const {
  if (u.space_ptr() != space_ &&
      (!(u.space().grid() == space_->grid()) || u.space().eta() != space_->eta()))
    raise(ErrorKind::incompatible, module, "function on the workspace grid", "grid or eta differ");
  Eigen::VectorXd y(dimension());
  encode_modal(space_->to_modal(u.phi()), y);
  y[dimension() - 1] = charge_weight_ * u.q();
  return y;
}

EtaFunction WeightedFrame::function(const Eigen::VectorXd& y) const {
  return EtaFunction(space_, space_->to_physical(decode_modal(y)),
                     y[dimension() - 1] / charge_weight_);
}

ConstraintBasis::ConstraintBasis(const PeakField& field, const RadialProfile& profile,
                                 std::shared_ptr<const WeightedFrame> frame)
    : frame_(std::move(frame)) {
  const FieldSpace& space = frame_->space();
  const int dims = space.grid().dim.value();
  const auto& vertices = field.vertices();
  const Eigen::Index count = static_cast<Eigen::Index>(vertices.size()) * dims;
  const Eigen::Index n = frame_->dimension() - 1;
  vectors_.resize(n, count);
  for (std::size_t k = 0; k < vertices.size(); ++k) {
    for (int i = 0; i < dims; ++i) {
      Field samples(space.size());
      for (std::size_t j = 0; j < samples.size(); ++j) {
        const Point x = space.grid().coordinate(j) - vertices[k];
        const double s = norm(x, space.grid().dim);
        samples[j] = s > 0.0 ? profile.derivative(s) * x[i] / s : 0.0;
      }
      const Eigen::Index column = static_cast<Eigen::Index>(k) * dims + i;
      frame_->encode_modal(space.to_modal(samples), vectors_.col(column));
    }
  }
  gram_ = vectors_.transpose() * vectors_;
  factor_.compute(gram_);
  const Eigen::VectorXd diagonal = gram_.diagonal();
  const double smallest = diagonal.minCoeff();
  const double largest = diagonal.maxCoeff();
  const double pivot = factor_.matrixL().toDenseMatrix().diagonal().cwiseAbs().minCoeff();
  if (factor_.info() != Eigen::Success || !(pivot * pivot > 1e-12 * largest) || !(smallest > 0.0))
    raise(ErrorKind::degeneracy, module, "constraint derivatives linearly independent",
          "Gram matrix of the peak derivatives is singular");
  double cross = 0.0;
  for (Eigen::Index a = 0; a < count; ++a)
    for (Eigen::Index b = 0; b < count; ++b)
      if (a / dims != b / dims) cross = std::max(cross, std::abs(gram_(a, b)));
  cross_peak_coupling_ = cross / largest;
}

Eigen::VectorXd ConstraintBasis::constraints(const EtaFunction& v) const {
  const Eigen::VectorXd y = frame_->coordinates(v);
  return vectors_.transpose() * y.head(vectors_.rows());
}

void ConstraintBasis::project(Eigen::Ref<Eigen::VectorXd> y) const {
  auto head = y.head(vectors_.rows());
  const Eigen::VectorXd coefficients = factor_.solve(vectors_.transpose() * head);
  head.noalias() -= vectors_ * coefficients;
}

EtaFunction ConstraintBasis::project(const EtaFunction& v) const {
  Eigen::VectorXd y = frame_->coordinates(v);
  project(y);
  return frame_->function(y);
}

EtaFunction ConstraintBasis::member(Eigen::Index index) const {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(frame_->dimension());
  y.head(vectors_.rows()) = vectors_.col(index);
  return frame_->function(y);
}

EtaFunction project(const EtaFunction& v, const ConstraintBasis& basis) {
  return basis.project(v);
}

ReductionWorkspace::ReductionWorkspace(const PeakConfiguration& config, const RadialProfile& profile,
                                       std::shared_ptr<const FieldSpace> space,
                                       ReductionTolerances tolerances)
    : frame_(std::make_shared<const WeightedFrame>(space)),
      field_(config, profile, space),
      basis_(field_, profile, frame_),
      tolerances_(tolerances) {
  if (!(tolerances_.aux_relative > 0.0 && tolerances_.aux_relative < 1.0) ||
      !(tolerances_.krylov > 0.0) || tolerances_.max_outer < 1 || tolerances_.max_krylov < 1)
    raise(ErrorKind::configuration, module, "tolerances in (0, 1) and positive iteration limits",
          "invalid reduction tolerances");
  const FieldSpace& s = *space;
  const double p = config.p;
  const Field w = field_.peaks();
  const double q = field_.charge();
  const Field& green = s.green();
  const std::size_t origin = s.grid().origin();
  slope_.resize(w.size());
  auto slope = [p](double u) { return (p - 1.0) * std::pow(std::abs(u), p - 2.0); };
  for (std::size_t j = 0; j < w.size(); ++j) slope_[j] = slope(w[j] + q * green[j]);
  slope_[origin] = 0.0;
  const CellRule& rule = s.cell_rule();
  cell_moments_[0] = cell_moments_[1] = cell_moments_[2] = 0.0;
  for (std::size_t i = 0; i < rule.radii.size(); ++i) {
    const double m = rule.weights[i] * slope(w[origin] + q * rule.green[i]);
    cell_moments_[0] += m;
    cell_moments_[1] += m * rule.green[i];
    cell_moments_[2] += m * rule.green[i] * rule.green[i];
  }
  residual_norm_ = gradient_coordinates(Eigen::VectorXd::Zero(frame_->dimension())).norm();
}

Eigen::VectorXd ReductionWorkspace::gradient_coordinates(const Eigen::VectorXd& y) const {
  const FieldSpace& s = frame_->space();
  const Field modal = frame_->decode_modal(y);
  const double nu_q = y[frame_->dimension() - 1] / frame_->charge_weight();
  const Remainder rem = field_.remainder(s.to_physical(modal), nu_q);
  Field source = s.to_modal(rem.source);
  const Field& symbol = s.symbol();
  for (std::size_t j = 0; j < source.size(); ++j) source[j] = modal[j] - source[j] / symbol[j];
  Eigen::VectorXd g(frame_->dimension());
  frame_->encode_modal(source, g);
  g[frame_->dimension() - 1] =
      frame_->charge_weight() * (nu_q - rem.green_moment / s.beta_one());
  return g;
}

EtaFunction ReductionWorkspace::full_gradient(const EtaFunction& nu) const {
  return frame_->function(gradient_coordinates(frame_->coordinates(nu)));
}

Eigen::VectorXd ReductionWorkspace::apply_hessian(const Eigen::VectorXd& y) const {
  const FieldSpace& s = frame_->space();
  const Eigen::Index last = frame_->dimension() - 1;
  const Field modal = frame_->decode_modal(y);
  const double charge = y[last] / frame_->charge_weight();
  const Field v = s.to_physical(modal);
  const Field& green = s.green();
  const std::size_t origin = s.grid().origin();
  const double volume = s.cell_volume();
  Field source(v.size());
  double moment = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    source[j] = slope_[j] * (v[j] + charge * green[j]);
    moment += green[j] * source[j];
  }
  source[origin] = (v[origin] * cell_moments_[0] + charge * cell_moments_[1]) / volume;
  moment = volume * moment + v[origin] * cell_moments_[1] + charge * cell_moments_[2];
  Field image = s.to_modal(source);
  const Field& symbol = s.symbol();
  for (std::size_t j = 0; j < image.size(); ++j) image[j] = modal[j] - image[j] / symbol[j];
  Eigen::VectorXd out(frame_->dimension());
  frame_->encode_modal(image, out);
  out[last] = frame_->charge_weight() * (charge - moment / s.beta_one());
  return out;
}

Eigen::VectorXd ReductionWorkspace::apply_projected_hessian(const Eigen::VectorXd& y) const {
  Eigen::VectorXd x = y;
  basis_.project(x);
  Eigen::VectorXd out = apply_hessian(x);
  basis_.project(out);
  return out;
}

EtaFunction ReductionWorkspace::apply_L(const EtaFunction& nu) const {
  return frame_->function(apply_projected_hessian(frame_->coordinates(nu)));
}

Eigen::VectorXd ReductionWorkspace::solve_coordinates(const Eigen::VectorXd& rhs, double tolerance,
                                                      int* iterations) const {
  Eigen::VectorXd b = rhs;
  basis_.project(b);
  ProjectedHessian op(*this);
  Eigen::MINRES<ProjectedHessian, Eigen::Lower | Eigen::Upper, Eigen::IdentityPreconditioner>
      solver;
  solver.compute(op);
  solver.setTolerance(tolerance);
  solver.setMaxIterations(tolerances_.max_krylov);
  Eigen::VectorXd x = solver.solve(b);
  basis_.project(x);
  if (iterations) *iterations = static_cast<int>(solver.iterations());
  return x;
}

EtaFunction ReductionWorkspace::solve_L(const EtaFunction& rhs, double tolerance,
                                        int* iterations) const {
  return frame_->function(solve_coordinates(frame_->coordinates(rhs), tolerance, iterations));
}

double ReductionWorkspace::inverse_bound(unsigned seed) const {
  if (inverse_bound_) return *inverse_bound_;
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd x(frame_->dimension());
  // Smooth random start: white noise damped by the symbol.
  for (Eigen::Index j = 0; j + 1 < x.size(); ++j)
    x[j] = normal(engine) / frame_->space().symbol()[static_cast<std::size_t>(j)];
  x[x.size() - 1] = normal(engine);
  basis_.project(x);
  x.normalize();
  double estimate = 0.0;
  for (int it = 0; it < tolerances_.inverse_iterations; ++it) {
    Eigen::VectorXd next = solve_coordinates(x, 1e-8, nullptr);
    const double growth = next.norm();
    x = next / growth;
    const bool settled = std::abs(growth - estimate) <= tolerances_.inverse_tolerance * growth;
    estimate = growth;
    if (settled && it > 1) break;
  }
  inverse_bound_ = estimate;
  return estimate;
}

const AuxiliaryResult& ReductionWorkspace::solve_auxiliary(const EtaFunction* start) {
  const double tolerance = aux_tolerance();
  Eigen::VectorXd y = start ? frame_->coordinates(*start)
                            : Eigen::VectorXd::Zero(frame_->dimension());
  basis_.project(y);
  std::vector<double> history;
  int krylov_total = 0;
  double contraction = 0.0;
  double residual = 0.0;
  for (int outer = 0;; ++outer) {
    Eigen::VectorXd g = gradient_coordinates(y);
    basis_.project(g);
    residual = g.norm();
    if (!history.empty()) contraction = std::max(contraction, residual / history.back());
    history.push_back(residual);
    if (residual <= tolerance) break;
    if (outer == tolerances_.max_outer)
      raise(ErrorKind::non_contraction, module, "contraction of the auxiliary fixed point",
            "projected residual " + std::to_string(residual) + " above " +
                std::to_string(tolerance) + " after " + std::to_string(outer) +
                " updates, contraction factor " + std::to_string(contraction));
    int iterations = 0;
    y -= solve_coordinates(g, tolerances_.krylov, &iterations);
    krylov_total += iterations;
  }
  auxiliary_ = AuxiliaryResult{frame_->function(y), residual, std::move(history), contraction,
                               krylov_total};
  return *auxiliary_;
}

double expansion_F(const PeakConfiguration& config, const RadialProfile& profile) {
  const double phi = profile.value(config.r);
  return config.peak_count() * ground_state_action(profile) - phi * phi / (2.0 * config.eta) +
         config.chi() * interaction_integral(profile, 3.0 * config.r);
}

double expansion_leading(const PeakConfiguration& config, const RadialProfile& profile) {
  const double phi = profile.value(config.r);
  const double beta = beta_one(CouplingParams::for_reduction(config.eta, config.dim));
  return config.peak_count() * ground_state_action(profile) - phi * phi / (2.0 * beta) +
         pair_coupling(config.pattern) * interaction_integral(profile, 3.0 * config.r);
}

double reduced_value(const ReductionWorkspace& ws) {
  if (!ws.auxiliary())
    raise(ErrorKind::validation, module, "auxiliary equation solved before evaluating sigma",
          "no auxiliary solution stored");
  return ws.field().action(ws.auxiliary()->nu);
}

namespace {

struct Evaluation {
  ScanPoint point;
  EtaFunction nu;
};

Evaluation evaluate(double r, const PeakConfiguration& base, const RadialProfile& profile,
                    const std::shared_ptr<const FieldSpace>& space, const ReductionTolerances& tol,
                    const EtaFunction* start) {
  PeakConfiguration config = base;
  config.r = r;
  ReductionWorkspace ws(config, profile, space, tol);
  const AuxiliaryResult& aux = ws.solve_auxiliary(start);
  ScanPoint point{};
  point.r = r;
  point.sigma = reduced_value(ws);
  point.action_w = ws.field().action(EtaFunction::zero(space));
  point.expansion = expansion_F(config, profile);
  point.leading = expansion_leading(config, profile);
  point.residual = ws.residual_norm();
  point.nu_norm = norm(aux.nu);
  point.projected_residual = aux.projected_residual;
  point.outer_iterations = static_cast<int>(aux.history.size()) - 1;
  point.krylov_iterations = aux.krylov_iterations;
  return {point, aux.nu};
}

}  // namespace

ReducedScan minimize_reduced(double eta, const PeakConfiguration& pattern_template,
                             const RadialProfile& profile, std::shared_ptr<const FieldSpace> space,
                             const ScanOptions& options) {
  if (options.samples < 17)
    raise(ErrorKind::configuration, module, "scan resolution of at least 17 radii",
          "got " + std::to_string(options.samples));
  PeakConfiguration base = pattern_template;
  base.eta = eta;
  const double c = options.c > 0.0 ? options.c : 8.0 * pair_coupling(base.pattern);
  ReducedScan scan{};
  scan.eta = eta;
  scan.interval = admissible_interval(eta, c, chi(base.pattern, base.p), profile);
  const double r_min = scan.interval.r_min;
  const double r_max = scan.interval.r_max;
  const int n = options.samples;
  std::optional<EtaFunction> previous;
  std::vector<EtaFunction> corrections;
  for (int i = 0; i < n; ++i) {
    const double r = r_min * std::pow(r_max / r_min, static_cast<double>(i) / (n - 1));
    const EtaFunction* start = options.warm_start && previous ? &*previous : nullptr;
    Evaluation e = evaluate(r, base, profile, space, options.tolerances, start);
    scan.points.push_back(e.point);
    corrections.push_back(e.nu);
    previous = std::move(e.nu);
  }
  const auto best = std::min_element(scan.points.begin(), scan.points.end(),
                                     [](const ScanPoint& a, const ScanPoint& b) {
                                       return a.sigma < b.sigma;
                                     });
  const auto index = static_cast<std::size_t>(best - scan.points.begin());
  scan.interior = index > 0 && index + 1 < scan.points.size();
  scan.r_eta = best->r;
  scan.sigma_min = best->sigma;
  if (!scan.interior) {
    raise(ErrorKind::boundary_minimum, module, "minimizer of sigma inside the admissible interval",
          "smallest sampled sigma at r = " + std::to_string(best->r) + " (interval [" +
              std::to_string(r_min) + ", " + std::to_string(r_max) + "])");
  }
  const double lo = scan.points[index - 1].r;
  const double hi = scan.points[index + 1].r;
  const double width = options.refine_relative * std::log(eta);
  // Brent's minimizer: golden-section steps with parabolic acceleration.
  const int bits = std::max(8, static_cast<int>(std::ceil(1.0 - std::log2(width / hi))));
  std::uintmax_t iterations = 100;
  auto sigma = [&](double r) {
    const EtaFunction* start = options.warm_start ? &corrections[index] : nullptr;
    Evaluation e = evaluate(r, base, profile, space, options.tolerances, start);
    scan.refinement.push_back(e.point);
    return e.point.sigma;
  };
  const auto [r_eta, sigma_eta] =
      boost::math::tools::brent_find_minima(sigma, lo, hi, bits, iterations);
  if (sigma_eta <= scan.sigma_min) {
    scan.r_eta = r_eta;
    scan.sigma_min = sigma_eta;
  }
  return scan;
}

Solution assemble_solution(ReductionWorkspace& ws, const ReducedScan& scan) {
  const PeakConfiguration& config = ws.config();
  if (std::abs(config.r - scan.r_eta) > 1e-12 * scan.r_eta || config.eta != scan.eta)
    raise(ErrorKind::incompatible, module, "workspace at the reduced minimizer",
          "workspace r = " + std::to_string(config.r) + ", minimizer " +
              std::to_string(scan.r_eta));
  if (!ws.auxiliary()) ws.solve_auxiliary();
  const AuxiliaryResult& aux = *ws.auxiliary();
  const PeakField& field = ws.field();
  const FieldSpace& space = field.space();
  EtaFunction u = field.superposition() + aux.nu;

  SolveReport report{};
  report.eta = config.eta;
  report.r_eta = config.r;
  report.r_over_log_eta = config.r / std::log(config.eta);
  report.sigma = reduced_value(ws);
  report.residual_w = ws.residual_norm();
  report.aux_tolerance = ws.aux_tolerance();
  report.projected_residual = aux.projected_residual;
  report.nu_norm = norm(aux.nu);
  report.inverse_bound = ws.inverse_bound();
  report.charge = u.q();
  report.distance_to_peaks = norm(EtaFunction(field.space_ptr(), aux.nu.phi(), u.q()));
  report.full_gradient = norm(ws.full_gradient(aux.nu));

  const GridSpec& grid = space.grid();
  const Dimension dim = grid.dim;
  const Field& green = space.green();
  Field values(u.phi().size());
  for (std::size_t j = 0; j < values.size(); ++j) values[j] = u.phi()[j] + u.q() * green[j];
  report.min_value = *std::min_element(values.begin(), values.end());
  report.max_value = *std::max_element(values.begin(), values.end());
  report.sign_change = report.min_value < 0.0 && report.max_value > 0.0;

  const std::size_t n = static_cast<std::size_t>(grid.interior());
  const double h = grid.spacing();
  std::vector<std::size_t> stride(static_cast<std::size_t>(dim.value()));
  for (int d = dim.value() - 1, s = 1; d >= 0; --d, s *= static_cast<int>(n))
    stride[static_cast<std::size_t>(d)] = static_cast<std::size_t>(s);
  const auto& vertices = field.vertices();
  for (std::size_t k = 0; k < vertices.size(); ++k) {
    const double sign = config.pattern[static_cast<int>(k)];
    std::size_t best = values.size();
    for (std::size_t j = 0; j < values.size(); ++j) {
      if (norm(grid.coordinate(j) - vertices[k], dim) > 0.5 * config.r) continue;
      if (best == values.size() || sign * values[j] > sign * values[best]) best = j;
    }
    if (best == values.size())
      raise(ErrorKind::peak_verification, module, "a grid node near every vertex",
            "no node within r/2 of vertex " + std::to_string(k + 1));
    // Sub-grid position from a parabola through the neighbours on each axis.
    Point location = grid.coordinate(best);
    for (int d = 0; d < dim.value(); ++d) {
      const std::size_t s = stride[static_cast<std::size_t>(d)];
      const double minus = values[best - s];
      const double plus = values[best + s];
      const double curvature = plus - 2.0 * values[best] + minus;
      if (sign * curvature < 0.0) location[d] -= 0.5 * h * (plus - minus) / curvature;
    }
    const double offset = norm(location - vertices[k], dim);
    report.peaks.push_back({vertices[k], location, values[best], offset});
    if (!(offset <= config.r / 10.0))
      raise(ErrorKind::peak_verification, module, "extremum within r/10 of its vertex",
            "peak " + std::to_string(k + 1) + " found " + std::to_string(offset) +
                " from its vertex, r = " + std::to_string(config.r));
  }
  return {std::move(u), std::move(report)};
}

}  // namespace multipeak
