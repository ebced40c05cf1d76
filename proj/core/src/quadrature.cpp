#include "multipeak/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <mutex>

#include "multipeak/closed_forms.hpp"
#include "multipeak/errors.hpp"

namespace multipeak {

namespace {

GaussRule make_gauss_legendre(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
  if (order < 1 || order > 512)
    raise(ErrorKind::domain, "quadrature", "Gauss-Legendre order in [1, 512]",
          "got " + std::to_string(order));
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, make_gauss_legendre(order)).first;
  return it->second;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<Eigen::Index>(x.size());
  if (n < 2 || y.size() != x.size())
    raise(ErrorKind::fit_quality, "quadrature", "at least two samples for a line fit",
          "got " + std::to_string(n));
  Eigen::MatrixXd a(n, 2);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = x[i];
    b(i) = y[i];
  }
  const Eigen::Vector2d c = a.colPivHouseholderQr().solve(b);
  const double max_residual = (a * c - b).cwiseAbs().maxCoeff();
  return {c(1), c(0), max_residual};
}

PlaneFit fit_plane(std::span<const double> x1, std::span<const double> x2,
                   std::span<const double> y) {
  const auto n = static_cast<Eigen::Index>(x1.size());
  if (n < 3 || x2.size() != x1.size() || y.size() != x1.size())
    raise(ErrorKind::fit_quality, "quadrature", "at least three samples for a plane fit",
          "got " + std::to_string(n));
  Eigen::MatrixXd a(n, 3);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = x1[i];
    a(i, 2) = x2[i];
    b(i) = y[i];
  }
  const Eigen::Vector3d c = a.colPivHouseholderQr().solve(b);
  const double max_residual = (a * c - b).cwiseAbs().maxCoeff();
  return {c(0), c(1), c(2), max_residual};
}

}  // namespace multipeak
