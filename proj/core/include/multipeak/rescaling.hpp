#pragma once

#include "multipeak/closed_forms.hpp"
#include "multipeak/field_space.hpp"

namespace multipeak {

/// -Delta_alpha u + omega u = |u|^{p-2} u.
struct OmegaProblem {
  double alpha;
  double omega;
  Dimension dim;
  double p;

  void validate() const;
  /// beta_alpha(omega), the charge weight of the energy space.
  double charge_weight() const;
};

/// Coupling of the equivalent problem with omega = 1: N = 2 gives
/// alpha + log(sqrt(omega)) / (2 pi), N = 3 gives alpha / sqrt(omega).
double alpha_omega(double alpha, double omega, Dimension dim);

/// |beta_{alpha_omega}(1) - omega^{-(N-2)/2} beta_alpha(omega)|.
double beta_consistency_check(double alpha, double omega, Dimension dim);

enum class ScaleDirection { to_unit, from_unit };

/// Largest dilation factor accepted in one resampling step.
inline constexpr double max_dilation = 8.0;

/// to_unit: u solves the omega problem with u = phi + q G_omega; returns
/// omega^{-1/(p-2)} u(omega^{-1/2} x), whose charge multiplies G_1. from_unit is
/// the inverse. The grid is kept; phi is resampled by evaluating its sine
/// series, and resolution error is raised when the dilation leaves
/// [1/8, 8] or the result carries more than `aliasing_tolerance` of its
/// H^1 norm in the top quarter of the modes.
EtaFunction rescale_solution(const EtaFunction& u, double p, double omega, ScaleDirection direction,
                             double aliasing_tolerance = 1e-6);

/// phi(s x) evaluated from the sine series of phi on the same grid; zero
/// where s x leaves the box.
Field dilate(const FieldSpace& space, std::span<const double> phi, double s);

/// Square root of the share of the H^1 norm carried by modes whose index
/// exceeds three quarters of the band on some axis.
double spectral_tail(const FieldSpace& space, std::span<const double> phi);

struct WeakResidual {
  double absolute;  // ||grad S(u)|| in the energy norm of the problem
  double relative;  // absolute / ||u||
};

/// Residual of the problem for u = phi + q G_omega on the grid of `u`: the
/// Riesz representer of S'(u) for S(u) = (||grad phi||^2 + omega ||phi||^2 +
/// beta_alpha(omega) q^2) / 2 - ||u||_p^p / p.
WeakResidual weak_form_residual(const EtaFunction& u, const OmegaProblem& problem);

}  // namespace multipeak
