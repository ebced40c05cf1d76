#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "multipeak/ground_state.hpp"

namespace multipeak {

/// Sampling parameters of the inequality and decay checks. `ball` scales the
/// inner region B(0, ball |y|^delta) of the split convolution estimate.
struct ValidatorParams {
  std::size_t samples = 100000;
  double delta = 0.25;
  double ball = 1.0;
  double epsilon = 0.5;
  /// Smallest |y| used by the angle check.
  double angle_threshold = 4.0;
  std::uint64_t seed = 20240611;

  void validate() const;
};

inline constexpr double inequality_floor = 1e-12;

struct InequalityReport {
  std::size_t samples = 0;
  std::size_t violations = 0;
  /// Largest (lhs - bound) / scale; at most zero when the bound holds.
  double max_slack = 0.0;
  bool passed() const noexcept { return violations == 0; }
};

/// ||a + b|^r - |a|^r| <= |b|^r for 0 < r <= 1.
InequalityReport check_elementary_1(std::size_t samples, std::uint64_t seed);

/// Left side of the K-term expansion bound, as stated: the absolute value of
/// |sum a|^r - sum |a_k|^r - 2 sum_{k1 != k2} a_k1 a_k2 |a_k2|^{r-2}.
double expansion_defect(std::span<const double> a, double r);
/// r sum over k1 != k3, k2 != k3 of |a_k1| |a_k2| |a_k3|^{r-2}.
double triple_sum_bound(std::span<const double> a, double r);
/// Random tuples normalized to max |a_k| = 1; requires 2 < r <= 3, 2 <= K <= 6.
InequalityReport check_elementary_2(int K, double r, std::size_t samples, std::uint64_t seed);

struct ConstantFit {
  std::size_t samples = 0;
  /// Smallest C with ||a+b|^r - |a|^r - r b a|a|^{r-2}| <= C (b^2 + |b|^r) on the sample.
  double fitted = 0.0;
  /// r (r - 1) 2^{r-2} / 2 max(M^{r-2}, 1).
  double bound = 0.0;
  bool passed() const noexcept { return fitted <= bound * (1.0 + 1e-9); }
};

double taylor_remainder(double a, double b, double r);
ConstantFit check_elementary_3(double M, double r, std::size_t samples, std::uint64_t seed);

/// ||y + x| - |y| - y.x/|y||, evaluated without cancellation.
double angle_defect(const Point& y, const Point& x, Dimension dim);
/// 2 |x|^2 / (|x + y| + |y|).
double angle_bound(const Point& y, const Point& x, Dimension dim);

struct AngleReport {
  InequalityReport sharp;   // against 2|x|^2 / (|x+y| + |y|)
  InequalityReport power;   // against 2 |y|^{2 delta - 1}
  /// Largest defect / bound; 1/2 is reached for x orthogonal to y.
  double max_ratio = 0.0;
  bool passed() const noexcept { return sharp.passed() && power.passed(); }
};

/// Random y with |y| >= angle_threshold and |x| <= |y|^delta.
AngleReport check_angle_estimates(const ValidatorParams& params, Dimension dim);

/// A radial function given through log|u|, with its envelope e^{-rate s} s^{-power}.
struct DecayProfile {
  std::string label;
  std::function<double(double)> log_abs;
  double rate;
  double power;

  static DecayProfile envelope(double rate, double power);
  static DecayProfile ground_state(std::shared_ptr<const RadialProfile> profile);
  /// |Phi'|, which shares the envelope of Phi.
  static DecayProfile ground_state_slope(std::shared_ptr<const RadialProfile> profile);
};

struct DecayWindow {
  double y_min = 10.0;
  double y_max = 40.0;
  int samples = 12;
  std::uint64_t seed = 20240611;
};

enum class DecayRegion { entire, inner_ball, outer };

struct DecayFitReport {
  std::vector<double> separations;
  std::vector<double> integrals;
  double rate = 0.0;   // fitted exponential rate
  double power = 0.0;  // fitted |y| power
  double target_rate = 0.0;
  double target_power = 0.0;
  double rate_margin = 0.0;   // rate - (target_rate - 0.05)
  double power_margin = 0.0;  // target_power + 0.3 - power
  double max_residual = 0.0;  // of the log-linear fit
  bool passed() const noexcept { return rate_margin >= 0.0 && power_margin >= 0.0; }
};

inline constexpr double rate_allowance = 0.05;
inline constexpr double power_allowance = 0.3;

/// The integral of |u1(x + y)| |u2(x)|^{r-1} over R^N, over the ball
/// B(0, ball |y|^delta), or over its complement.
double convolution_integral(const DecayProfile& u1, const DecayProfile& u2, double r, Dimension dim,
                            double separation, DecayRegion region = DecayRegion::entire,
                            double delta = 0.0, double ball = 1.0);

/// Fits log J(y) = c - rate |y| + power log|y| on jittered samples of the
/// window. Entire space: target power N - beta1 - (r-1) beta2. Inner ball:
/// delta (N - (r-1) beta2) - beta1. The outer region is reported against
/// the entire-space target. Fit-quality error when the window has fewer than
/// 8 samples or spans fewer than ten e-foldings of u1.
DecayFitReport fit_convolution_decay(const DecayProfile& u1, const DecayProfile& u2, double r,
                                     Dimension dim, const DecayWindow& window,
                                     DecayRegion region = DecayRegion::entire,
                                     double delta = 0.0, double ball = 1.0);

/// A weighted error w(s) sampled on a window. Bounded means the tail third of
/// the window stays below 1.5 times the largest value on the head third.
struct WeightedErrorReport {
  std::vector<double> radii;
  std::vector<double> weighted;
  double head_max = 0.0;
  double tail_max = 0.0;
  double last = 0.0;
  bool passed() const noexcept { return tail_max <= 1.5 * head_max + inequality_floor; }
};

/// |G(z) - e^{-|z|} / (2^{3/2} pi^{1/2} |z|^{1/2})| e^{|z|} |z|^{3/2} for N = 2.
WeightedErrorReport check_greens_expansion_2d(double z_min = 5.0, double z_max = 50.0,
                                              int samples = 46);

/// |Phi(s) - amplitude e^{-s} / s^{(N-1)/2}| e^s s^{(N+1-epsilon)/2}.
WeightedErrorReport check_error_in_limit(const RadialProfile& profile, double amplitude,
                                         double epsilon, double s_min, double s_max,
                                         int samples);

/// |I(y) - theta Phi(y)| e^{|y|} |y|^{(N+1-epsilon)/2}.
WeightedErrorReport check_interaction_error(const RadialProfile& profile, double epsilon,
                                            double y_min, double y_max, int samples);

struct SymmetryReport {
  std::vector<double> values;
  double reference = 0.0;
  double max_relative = 0.0;
  bool passed() const noexcept { return max_relative <= 1e-8; }
};

/// The integral of e^{-x.z} Phi^{p-1} for random unit z against z = e_1.
SymmetryReport check_symmetric_integral(const RadialProfile& profile, int directions,
                                        std::uint64_t seed);

/// One named outcome of run_validation. Ungated entries are diagnostics.
struct ValidationEntry {
  std::string name;
  bool gated = true;
  bool passed = false;
  std::vector<std::pair<std::string, double>> metrics;
};

struct ValidationSummary {
  std::vector<ValidationEntry> entries;
  bool passed() const noexcept;
};

/// Every check on the given ground states (one per dimension is typical).
ValidationSummary run_validation(const ValidatorParams& params,
                                 std::span<const std::shared_ptr<const RadialProfile>> profiles);

}  // namespace multipeak
