#pragma once

#include <Eigen/Core>
#include <Eigen/Cholesky>

#include <memory>
#include <optional>
#include <vector>

#include "multipeak/ansatz.hpp"

namespace multipeak {

/// Coordinates in which the H^1_eta inner product is the Euclidean one: sine
/// coefficients scaled by sqrt(modal_scale (1 + |k|^2)), then sqrt(beta) q.
class WeightedFrame {
 public:
  explicit WeightedFrame(std::shared_ptr<const FieldSpace> space);

  const FieldSpace& space() const noexcept { return *space_; }
  const std::shared_ptr<const FieldSpace>& space_ptr() const noexcept { return space_; }
  Eigen::Index dimension() const noexcept { return static_cast<Eigen::Index>(weights_.size()) + 1; }

  Eigen::VectorXd coordinates(const EtaFunction& u) const;
  EtaFunction function(const Eigen::VectorXd& y) const;
  /// Scales sine coefficients into the first n coordinates.
  void encode_modal(std::span<const double> modal, Eigen::Ref<Eigen::VectorXd> y) const;
  Field decode_modal(const Eigen::VectorXd& y) const;
  double charge_weight() const noexcept { return charge_weight_; }

 private:
  std::shared_ptr<const FieldSpace> space_;
  Field weights_;
  double charge_weight_;
};

/// The N K derivatives d_i Phi(. - zeta_k) and their H^1 Gram matrix.
class ConstraintBasis {
 public:
  ConstraintBasis(const PeakField& field, const RadialProfile& profile,
                  std::shared_ptr<const WeightedFrame> frame);

  Eigen::Index size() const noexcept { return vectors_.cols(); }
  const Eigen::MatrixXd& gram() const noexcept { return gram_; }
  /// Largest |Gram entry| between different peaks over the largest diagonal entry.
  double cross_peak_coupling() const noexcept { return cross_peak_coupling_; }
  /// <v.phi | d_i Phi_k>_{H^1} for every basis member.
  Eigen::VectorXd constraints(const EtaFunction& v) const;
  EtaFunction project(const EtaFunction& v) const;
  void project(Eigen::Ref<Eigen::VectorXd> y) const;
  EtaFunction member(Eigen::Index index) const;

 private:
  std::shared_ptr<const WeightedFrame> frame_;
  Eigen::MatrixXd vectors_;  // weighted coordinates without the charge slot
  Eigen::MatrixXd gram_;
  Eigen::LLT<Eigen::MatrixXd> factor_;
  double cross_peak_coupling_;
};

EtaFunction project(const EtaFunction& v, const ConstraintBasis& basis);

struct ReductionTolerances {
  double aux_relative = 1e-6;  // aux_tol = aux_relative ||grad S(W)||
  double krylov = 1e-11;
  int max_outer = 40;
  int max_krylov = 3000;
  int inverse_iterations = 40;
  double inverse_tolerance = 1e-4;
};

struct AuxiliaryResult {
  EtaFunction nu;
  double projected_residual;
  std::vector<double> history;  // projected residual before each update
  double contraction;           // largest ratio of successive residuals
  int krylov_iterations;
};

/// Everything needed at one (eta, r): W, the constraint space, the Hessian
/// at W and, once solved, the auxiliary correction nu. Single-threaded.
class ReductionWorkspace {
 public:
  ReductionWorkspace(const PeakConfiguration& config, const RadialProfile& profile,
                     std::shared_ptr<const FieldSpace> space, ReductionTolerances tolerances = {});

  const PeakConfiguration& config() const noexcept { return field_.config(); }
  const PeakField& field() const noexcept { return field_; }
  const ConstraintBasis& basis() const noexcept { return basis_; }
  const WeightedFrame& frame() const noexcept { return *frame_; }
  const ReductionTolerances& tolerances() const noexcept { return tolerances_; }

  /// ||grad S(W)||.
  double residual_norm() const noexcept { return residual_norm_; }
  double aux_tolerance() const noexcept { return tolerances_.aux_relative * residual_norm_; }

  /// Projected Hessian at W applied to a constrained nu.
  EtaFunction apply_L(const EtaFunction& nu) const;
  /// L^{-1} rhs on the constraint space; returns the Krylov iteration count.
  EtaFunction solve_L(const EtaFunction& rhs, double tolerance, int* iterations = nullptr) const;
  /// Measured bound on ||L^{-1}||, by inverse iteration. Cached.
  double inverse_bound(unsigned seed = 1) const;

  /// Fixed point nu <- nu - L^{-1} project(grad S(W + nu)).
  const AuxiliaryResult& solve_auxiliary(const EtaFunction* start = nullptr);
  const std::optional<AuxiliaryResult>& auxiliary() const noexcept { return auxiliary_; }

  /// grad S(W + nu), not projected.
  EtaFunction full_gradient(const EtaFunction& nu) const;

  Eigen::VectorXd apply_hessian(const Eigen::VectorXd& y) const;
  Eigen::VectorXd apply_projected_hessian(const Eigen::VectorXd& y) const;

 private:
  Eigen::VectorXd gradient_coordinates(const Eigen::VectorXd& y) const;
  Eigen::VectorXd solve_coordinates(const Eigen::VectorXd& rhs, double tolerance,
                                    int* iterations) const;

  std::shared_ptr<const WeightedFrame> frame_;
  PeakField field_;
  ConstraintBasis basis_;
  ReductionTolerances tolerances_;
  double residual_norm_;
  Field slope_;  // (p - 1)|W|^{p-2} at nodes
  double cell_moments_[3];
  mutable std::optional<double> inverse_bound_;
  std::optional<AuxiliaryResult> auxiliary_;
};

/// K C_0 - Phi(r)^2 / (2 eta) + chi I(3r).
double expansion_F(const PeakConfiguration& config, const RadialProfile& profile);
/// K C_0 - Phi(r)^2 / (2 beta_eta(1)) + pair_coupling I(3r): the leading terms of
/// S(W) as they come out of the pairwise interaction sums.
double expansion_leading(const PeakConfiguration& config, const RadialProfile& profile);

/// S(W + nu) with the stored auxiliary solution.
double reduced_value(const ReductionWorkspace& ws);

struct ScanOptions {
  int samples = 33;
  double c = 0.0;                 // interval constant; 0 selects 8 pair_coupling
  double refine_relative = 1e-6;  // golden-section width relative to log eta
  ReductionTolerances tolerances;
  bool warm_start = true;
};

struct ScanPoint {
  double r;
  double sigma;
  double action_w;     // S(W)
  double expansion;    // F_eta(r)
  double leading;      // expansion_leading
  double residual;     // ||grad S(W)||
  double nu_norm;
  double projected_residual;
  int outer_iterations;
  int krylov_iterations;
};

struct ReducedScan {
  double eta;
  AdmissibleInterval interval;
  std::vector<ScanPoint> points;     // sorted by r
  std::vector<ScanPoint> refinement;  // golden-section evaluations
  double r_eta;
  double sigma_min;
  bool interior;
};

/// Scans sigma over the admissible interval, then refines the minimizer.
/// Boundary-minimum error when the smallest sample sits on an endpoint.
ReducedScan minimize_reduced(double eta, const PeakConfiguration& pattern_template,
                             const RadialProfile& profile, std::shared_ptr<const FieldSpace> space,
                             const ScanOptions& options = {});

struct PeakLocation {
  Point vertex;
  Point extremum;
  double value;
  double offset;
};

struct SolveReport {
  double eta;
  double r_eta;
  double r_over_log_eta;
  double sigma;
  double residual_w;
  double aux_tolerance;
  double projected_residual;
  double nu_norm;
  double inverse_bound;
  double charge;
  double distance_to_peaks;  // ||u - sum delta_k Phi_k||_{H^1_eta}
  double full_gradient;      // ||grad S(u)||
  double min_value;
  double max_value;
  bool sign_change;
  std::vector<PeakLocation> peaks;
};

struct Solution {
  EtaFunction u;
  SolveReport report;
};

/// u = W + nu at the workspace radius with its diagnostics. Peak-verification
/// error when an extremum is farther than r/10 from its vertex.
Solution assemble_solution(ReductionWorkspace& ws, const ReducedScan& scan);

}  // namespace multipeak
