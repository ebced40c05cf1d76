#pragma once

#include <memory>
#include <span>
#include <vector>

#include "multipeak/closed_forms.hpp"
#include "multipeak/field_space.hpp"
#include "multipeak/ground_state.hpp"

namespace multipeak {

/// Signs delta_1 .. delta_K of the peaks. Accepted only when the cyclic sum
/// delta_K delta_1 + sum delta_k delta_{k+1} is negative.
class SignPattern {
 public:
  explicit SignPattern(std::vector<int> deltas);
  /// (+1, -1, +1, ...).
  static SignPattern alternating(int peak_count);

  int size() const noexcept { return static_cast<int>(deltas_.size()); }
  int operator[](int k) const { return deltas_.at(static_cast<std::size_t>(k)); }
  const std::vector<int>& deltas() const noexcept { return deltas_; }
  int cyclic_sum() const noexcept;

 private:
  std::vector<int> deltas_;
};

/// Nearest-neighbour sign correlation with the sign flipped: -delta_1 delta_2
/// for two peaks, minus the cyclic sum otherwise. It is the coefficient of
/// I(3r) in S(W) - K C_0 at leading order.
double pair_coupling(const SignPattern& pattern);

/// ((4 - p) / (2p)) pair_coupling(pattern); requires 2 < p < 4.
double chi(const SignPattern& pattern, double p);

/// Vertices of the regular K-gon with side 3r whose last vertex is (-r, 0).
std::vector<Point> polygon_vertices(int peak_count, double r, Dimension dim);

struct PeakConfiguration {
  Dimension dim;
  double p;
  double eta;
  double r;
  SignPattern pattern;

  int peak_count() const noexcept { return pattern.size(); }
  std::vector<Point> vertices() const { return polygon_vertices(peak_count(), r, dim); }
  double chi() const { return multipeak::chi(pattern, p); }
  void validate() const;
};

/// Peaks must stay this many decay lengths inside the box.
inline constexpr double peak_margin = 12.0;

/// Geometry error unless every point lies peak_margin inside the box.
void require_inside(const GridSpec& grid, std::span<const Point> points);

/// Phi(. - y) + Phi(|y|) / beta_eta(1) G on the grid of `space`.
EtaFunction building_block(double eta, const Point& y, const RadialProfile& profile,
                           std::shared_ptr<const FieldSpace> space);

/// Signed sum of building blocks on the polygon vertices.
EtaFunction pseudo_critical(const PeakConfiguration& config, const RadialProfile& profile,
                            std::shared_ptr<const FieldSpace> space);

struct AdmissibleInterval {
  double r_min;
  double r_max;
  double c;
  double r_mid() const noexcept { return 0.5 * (r_min + r_max); }
};

/// Phi(r)^2 / I(3r).
double admissibility_ratio(const RadialProfile& profile, double r);

/// Radii where eta / log eta < Phi(r)^2 / I(3r) < c eta. `chi_value` is the
/// coefficient c must exceed four times.
AdmissibleInterval admissible_interval(double eta, double c, double chi_value,
                                       const RadialProfile& profile);

/// ||gradient(W)|| on the grid.
double residual_norm(const EtaFunction& w, double p);

/// r^{((3-p)N+p-1)/(2p')} eta^{-min(3/p', 2(p-2)+1/p')}, the expected size of
/// the residual of W.
double residual_scale(Dimension dim, double p, double r, double eta);

/// Integrals over the grid of functions of u = W + nu.
struct Remainder {
  Field source;           // f(u) - sum_k delta_k f(Phi_k) at nodes
  double green_moment;    // integral of G times source
  double excess;          // integral of |u|^p - sum Phi_k^p - p s_W (u - sum delta_k Phi_k)
};

/// W = sum_k delta_k Psi_k stored per node as the largest peak plus the rest,
/// so that action and gradient near W are evaluated without cancelling the
/// single-peak parts, whose contribution is known in closed form.
class PeakField {
 public:
  PeakField(const PeakConfiguration& config, const RadialProfile& profile,
            std::shared_ptr<const FieldSpace> space);

  const PeakConfiguration& config() const noexcept { return config_; }
  const FieldSpace& space() const noexcept { return *space_; }
  const std::shared_ptr<const FieldSpace>& space_ptr() const noexcept { return space_; }
  const std::vector<Point>& vertices() const noexcept { return vertices_; }

  /// W itself.
  EtaFunction superposition() const;
  /// sum_k delta_k Phi_k without the charge.
  Field peaks() const;
  double charge() const noexcept { return vertex_sum_ / space_->beta_one(); }
  /// sum_k delta_k Phi(|zeta_k|).
  double vertex_sum() const noexcept { return vertex_sum_; }
  /// 1/2 sum over ordered pairs k1 != k2 of delta delta I(|zeta_k1 - zeta_k2|).
  double pair_energy() const noexcept { return pair_energy_; }
  double ground_action() const noexcept { return ground_action_; }

  Remainder remainder(std::span<const double> nu_phi, double nu_q) const;

  /// S(W + nu) - K C_0.
  double action_excess(const EtaFunction& nu) const;
  double action(const EtaFunction& nu) const;
  EtaFunction gradient(const EtaFunction& nu) const;
  double residual_norm() const;

 private:
  PeakConfiguration config_;
  std::shared_ptr<const FieldSpace> space_;
  std::vector<Point> vertices_;
  double vertex_sum_;
  double pair_energy_;
  double ground_action_;
  Field lead_;         // signed value of the largest peak
  Field rest_value_;   // remaining peaks
  Field rest_source_;  // sum of delta f(Phi) over the remaining peaks
  Field rest_power_;   // sum of Phi^p over the remaining peaks
};

}  // namespace multipeak
