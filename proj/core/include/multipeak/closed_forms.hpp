#pragma once

#include <array>
#include <cstddef>
#include <optional>

namespace multipeak {

/// Spatial dimension, restricted to 2 or 3.
class Dimension {
 public:
  explicit Dimension(int value);
  static Dimension two() { return Dimension(2); }
  static Dimension three() { return Dimension(3); }

  int value() const noexcept { return value_; }
  bool is_two() const noexcept { return value_ == 2; }
  bool operator==(const Dimension&) const = default;

 private:
  int value_;
};

/// Points always carry three coordinates; the third is zero for N = 2.
using Point = std::array<double, 3>;

double norm(const Point& x, Dimension dim);
Point operator-(const Point& a, const Point& b);
Point operator+(const Point& a, const Point& b);

inline constexpr double euler_gamma = 0.577215664901532860606512090082;
inline constexpr double pi = 3.141592653589793238462643383280;

/// Modified Bessel function of the second kind for orders 0, 1/2 and 1.
double bessel_k(double order, double t);
/// e^t K_order(t), finite for all t > 0.
double scaled_bessel_k(double order, double t);

/// Green's function of (-Delta + lambda) in two or three dimensions.
class GreensEvaluator {
 public:
  GreensEvaluator(double lambda, Dimension dim);

  double lambda() const noexcept { return lambda_; }
  Dimension dim() const noexcept { return dim_; }

  /// Value at radius |x|; throws on radius <= 0.
  double radial(double radius) const;
  /// Radial derivative dG/d|x|.
  double radial_derivative(double radius) const;
  double operator()(const Point& x) const;

 private:
  double lambda_;
  double sqrt_lambda_;
  Dimension dim_;
};

/// Coupling data. `alpha` is the point interaction strength; in the
/// reduction the role of alpha is played by `eta`.
struct CouplingParams {
  double alpha;
  Dimension dim;

  /// Coupling used by the reduction; requires beta(1) > 0.
  static CouplingParams for_reduction(double eta, Dimension dim);
};

double beta(const CouplingParams& c, double lambda);
inline double beta_one(const CouplingParams& c) { return beta(c, 1.0); }

/// Negative eigenvalue of the point interaction Hamiltonian, if any.
std::optional<double> bound_state_energy(const CouplingParams& c);

/// (9 + sqrt(113)) / 8.
double p_star();
/// Whether 2 (2 (p - 2) + 1/p') > 3 with p' = p / (p - 1).
bool p_star_threshold(double p);
/// 3 |exp(4 pi i / K) - 1|.
double ell(int peak_count);
/// Coefficient c_N with G(x) ~ c_N exp(-|x|) / |x|^{(N-1)/2}.
double green_far_field_prefactor(Dimension dim);
/// Surface area of the unit sphere in R^N.
double unit_sphere_area(Dimension dim);

}  // namespace multipeak
