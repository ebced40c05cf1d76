#pragma once

#include <span>
#include <vector>

namespace multipeak {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

const GaussRule& gauss_legendre(int order);

/// Composite Gauss-Legendre over [a, b] with `panels` equal panels.
template <typename F>
double composite_gauss(F&& f, double a, double b, int panels, int order) {
  const GaussRule& rule = gauss_legendre(order);
  const double width = (b - a) / panels;
  double sum = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double mid = a + (i + 0.5) * width;
    double panel = 0.0;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j)
      panel += rule.weights[j] * f(mid + 0.5 * width * rule.nodes[j]);
    sum += panel * 0.5 * width;
  }
  return sum;
}

/// Least squares line y = intercept + slope * x.
struct LineFit {
  double slope;
  double intercept;
  double max_residual;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Least squares fit of y = c0 + c1 * x1 + c2 * x2.
struct PlaneFit {
  double c0;
  double c1;
  double c2;
  double max_residual;
};

PlaneFit fit_plane(std::span<const double> x1, std::span<const double> x2,
                   std::span<const double> y);

}  // namespace multipeak
