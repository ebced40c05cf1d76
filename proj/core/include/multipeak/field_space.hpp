#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "multipeak/aligned.hpp"
#include "multipeak/closed_forms.hpp"

namespace multipeak {

/// Box [-L, L]^N with homogeneous Dirichlet walls and M cells per axis. The
/// unknowns live on the M - 1 interior nodes of each axis; the origin is a node.
struct GridSpec {
  Dimension dim = Dimension::two();
  double half_width = 64.0;
  int nodes_per_axis = 1024;

  int interior() const noexcept { return nodes_per_axis - 1; }
  double spacing() const noexcept { return 2.0 * half_width / nodes_per_axis; }
  std::size_t size() const noexcept;
  /// Flat index of the node at the origin.
  std::size_t origin() const noexcept;
  Point coordinate(std::size_t flat) const noexcept;
  void validate() const;

  bool operator==(const GridSpec&) const = default;
};

/// Radial quadrature for the grid cell centred at the origin: the integral of
/// F(|x|) over the cell is the sum of weights[i] * F(radii[i]).
struct CellRule {
  std::vector<double> radii;
  std::vector<double> weights;
  std::vector<double> green;  // G_1 at the radii
};

/// Spectral discretization of H^1_eta on one grid for one coupling eta.
/// Immutable after construction and safe to share between threads.
class FieldSpace {
 public:
  FieldSpace(GridSpec grid, double eta);
  ~FieldSpace();
  FieldSpace(const FieldSpace&) = delete;
  FieldSpace& operator=(const FieldSpace&) = delete;

  static std::shared_ptr<const FieldSpace> create(GridSpec grid, double eta);

  const GridSpec& grid() const noexcept { return grid_; }
  double eta() const noexcept { return eta_; }
  double beta_one() const noexcept { return beta_one_; }
  std::size_t size() const noexcept { return grid_.size(); }

  /// Sine coefficients of grid samples and back.
  Field to_modal(std::span<const double> samples) const;
  Field to_physical(std::span<const double> modal) const;
  /// 1 + |k|^2 per sine mode.
  const Field& symbol() const noexcept { return symbol_; }
  /// Scale turning sums over modes into H^1 inner products.
  double modal_scale() const noexcept { return modal_scale_; }
  double modal_inner(std::span<const double> a, std::span<const double> b) const;

  /// h^N times the sum of the samples.
  double quadrature(std::span<const double> samples) const;
  /// G_1 at the nodes; the origin entry holds the cell average.
  const Field& green() const noexcept { return green_; }
  const CellRule& cell_rule() const noexcept { return cell_rule_; }
  double cell_volume() const noexcept;

  /// (-Delta + 1)^{-1} applied to grid samples.
  Field helmholtz_inverse(std::span<const double> source) const;
  /// (-Delta + 1) applied spectrally to grid samples.
  Field helmholtz_apply(std::span<const double> samples) const;

  /// Samples f(|x - center|) at all nodes.
  Field sample_radial(const Point& center, const std::function<double(double)>& f) const;

 private:
  struct Plan;
  void transform(const double* in, double* out) const;

  GridSpec grid_;
  double eta_;
  double beta_one_;
  double modal_scale_;
  double inverse_normalization_;
  Field symbol_;
  Field green_;
  CellRule cell_rule_;
  std::unique_ptr<Plan> plan_;
};

/// Element phi + q G of the energy space.
class EtaFunction {
 public:
  EtaFunction(std::shared_ptr<const FieldSpace> space, Field phi, double q);
  static EtaFunction zero(std::shared_ptr<const FieldSpace> space);

  const Field& phi() const noexcept { return phi_; }
  double q() const noexcept { return q_; }
  const FieldSpace& space() const noexcept { return *space_; }
  const std::shared_ptr<const FieldSpace>& space_ptr() const noexcept { return space_; }

  EtaFunction& operator+=(const EtaFunction& other);
  EtaFunction& operator-=(const EtaFunction& other);
  EtaFunction& operator*=(double factor);

 private:
  std::shared_ptr<const FieldSpace> space_;
  Field phi_;
  double q_;
};

EtaFunction operator+(EtaFunction a, const EtaFunction& b);
EtaFunction operator-(EtaFunction a, const EtaFunction& b);
EtaFunction operator*(double factor, EtaFunction a);

void require_compatible(const EtaFunction& a, const EtaFunction& b);

double inner_product(const EtaFunction& u1, const EtaFunction& u2);
double norm(const EtaFunction& u);
double action(const EtaFunction& u, double p);
EtaFunction gradient(const EtaFunction& u, double p);
EtaFunction hessian_apply(const EtaFunction& u, const EtaFunction& v, double p);
double lp_norm(const EtaFunction& u, double r);

/// Largest |phi| on the outermost node layer relative to max |phi|.
double truncation_defect(const EtaFunction& u);

/// Result of sampling a nonlinearity F(u) for u = phi + q G.
struct NonlinearSample {
  Field values;         // F(u) at nodes, origin entry = cell average
  double green_moment;  // integral of G F(u)
  double integral;      // integral of F(u)
};

/// Evaluates F(phi(x) + q G(x)) at all nodes. Near the origin the integrals
/// use the cell rule with phi frozen at its origin value.
NonlinearSample sample_nonlinear(const FieldSpace& space, std::span<const double> phi,
                                 double q, const std::function<double(double)>& f);

/// Snapshot: text header line "dim M L eta q", then the raw row-major
/// float64 samples of phi.
void save_snapshot(const EtaFunction& u, const std::filesystem::path& path);
EtaFunction load_snapshot(const std::filesystem::path& path);

}  // namespace multipeak
