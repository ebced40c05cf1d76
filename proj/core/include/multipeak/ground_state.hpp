#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "multipeak/closed_forms.hpp"

namespace multipeak {

struct GroundStateParams {
  Dimension dim = Dimension::two();
  double p = 3.0;
  /// Radial extent of the sampled profile.
  double s_max = 40.0;
  /// Number of uniform nodes on [0, s_max], endpoints included.
  int node_count = 10241;
  /// Relative width of the final shooting bracket for Phi(0).
  double shooting_tolerance = 1e-17;
  /// Tail closure starts where Phi drops below this fraction of Phi(0).
  double tail_threshold = 1e-6;
  /// Lower bound on the matching radius.
  double min_match_radius = 12.0;
  /// Optional user supplied bracket for Phi(0).
  std::optional<std::pair<double, double>> bracket;

  void validate() const;
};

/// Positive radial solution of -u'' - (N-1)/s u' + u = u^{p-1}, sampled on a
/// uniform grid and continued by A T(s) beyond it, where T(s) = e^{-s}/s for
/// N = 3 and sqrt(2/pi) K_0(s) for N = 2.
class RadialProfile {
 public:
  RadialProfile(Dimension dim, double p, double s_max, std::vector<double> values,
                std::vector<double> derivatives, double tail_amplitude,
                double matched_radius, double matching_defect = 0.0);

  Dimension dim() const noexcept { return dim_; }
  double p() const noexcept { return p_; }
  double s_max() const noexcept { return s_max_; }
  double spacing() const noexcept { return spacing_; }
  int node_count() const noexcept { return static_cast<int>(values_.size()); }
  std::span<const double> values() const noexcept { return values_; }
  std::span<const double> derivatives() const noexcept { return derivatives_; }
  double node(int i) const noexcept { return i * spacing_; }

  double peak() const noexcept { return values_.front(); }
  /// Limit of s^{(N-1)/2} e^s Phi(s).
  double tail_amplitude() const noexcept { return tail_amplitude_; }
  double matched_radius() const noexcept { return matched_radius_; }
  /// Relative jump of Phi' where the shooting and tail solutions meet.
  double matching_defect() const noexcept { return matching_defect_; }
  /// The integral of e^{x.z} Phi^{p-1}, computed at construction.
  double theta() const noexcept { return theta_; }

  double value(double s) const;
  double derivative(double s) const;
  double second_derivative(double s) const;
  /// log Phi(s), finite far beyond double underflow of Phi.
  double log_value(double s) const;
  /// ODE residual u'' + (N-1)/s u' - u + u^{p-1} of the interpolant.
  double ode_residual(double s) const;

  /// The far-field shape T(s) and its derivative.
  double tail_shape(double s) const;
  double tail_shape_derivative(double s) const;
  double log_tail_shape(double s) const;

 private:
  struct Hermite {
    double value;
    double first;
    double second;
  };
  Hermite interpolate(double s) const;
  double node_second_derivative(int i) const;

  Dimension dim_;
  double p_;
  double s_max_;
  double spacing_;
  std::vector<double> values_;
  std::vector<double> derivatives_;
  std::vector<double> second_derivatives_;
  double tail_amplitude_;
  double far_amplitude_;
  double matched_radius_;
  double matching_defect_;
  double theta_;
};

RadialProfile solve_ground_state(const GroundStateParams& params);

/// Integral of e^{-x.z} Phi(x)^{p-1} over R^N for a unit vector z, from the
/// radial representation with a fixed angular frame.
double theta_phi(const RadialProfile& profile, const Point& z);
double theta_phi(const RadialProfile& profile);

/// Integral of Phi(x + y) Phi(x)^{p-1} over R^N for |y| = separation.
double interaction_integral(const RadialProfile& profile, double separation);

/// ||Phi||^2_{H^1} by radial quadrature.
double h1_norm_squared(const RadialProfile& profile);
/// C_0 = S_infinity(Phi) = (p - 2) / (2 p) ||Phi||^2_{H^1}.
double ground_state_action(const RadialProfile& profile);

/// |Phi(s) - A e^{-s} / s^{(N-1)/2}| with A the tail amplitude.
double asymptotic_error(const RadialProfile& profile, double radius);

struct ConvolutionCheck {
  std::vector<double> radii;
  std::vector<double> errors;
  double sup_error;
};

/// Compares Phi with Phi^{p-1} * G at fixed test radii. `resolution` is the
/// number of two-point Gauss panels per unit length.
ConvolutionCheck convolution_identity_check(const RadialProfile& profile,
                                            int resolution = 16);

void save_profile(const RadialProfile& profile, const std::filesystem::path& path);
RadialProfile load_profile(const std::filesystem::path& path);

}  // namespace multipeak
