#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <random>
#include <utility>

#include "multipeak/field_space.hpp"
#include "multipeak/ground_state.hpp"

namespace test_support {

/// Ground states are solved once per test binary.
inline std::shared_ptr<const multipeak::RadialProfile> profile(int dim, double p) {
  static std::map<std::pair<int, double>, std::shared_ptr<const multipeak::RadialProfile>> cache;
  auto& slot = cache[{dim, p}];
  if (!slot) {
    multipeak::GroundStateParams params;
    params.dim = multipeak::Dimension(dim);
    params.p = p;
    slot = std::make_shared<const multipeak::RadialProfile>(multipeak::solve_ground_state(params));
  }
  return slot;
}

/// A sum of a few random Gaussian wave packets; smooth and well inside the box.
inline multipeak::Field random_field(const multipeak::FieldSpace& space, std::mt19937_64& rng,
                                     double spread = 8.0) {
  std::uniform_real_distribution<double> centre(-spread, spread);
  std::uniform_real_distribution<double> width(0.05, 0.4);
  std::uniform_real_distribution<double> wave(-1.0, 1.0);
  multipeak::Field out(space.size(), 0.0);
  for (int packet = 0; packet < 3; ++packet) {
    const double cx = centre(rng), cy = centre(rng), cz = centre(rng);
    const double a = width(rng), kx = wave(rng), ky = wave(rng), amp = wave(rng);
    for (std::size_t j = 0; j < out.size(); ++j) {
      const auto x = space.grid().coordinate(j);
      const double dz = space.grid().dim.is_two() ? 0.0 : x[2] - cz;
      const double d2 = (x[0] - cx) * (x[0] - cx) + (x[1] - cy) * (x[1] - cy) + dz * dz;
      out[j] += amp * std::exp(-a * d2) * std::cos(kx * x[0] + ky * x[1]);
    }
  }
  return out;
}

/// d_axis Phi(. - centre) sampled on the grid.
inline multipeak::Field profile_derivative(const multipeak::FieldSpace& space,
                                           const multipeak::RadialProfile& phi, int axis,
                                           const multipeak::Point& centre = {0.0, 0.0, 0.0}) {
  multipeak::Field out(space.size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    multipeak::Point x = space.grid().coordinate(j);
    for (int k = 0; k < 3; ++k) x[k] -= centre[k];
    const double s = multipeak::norm(x, space.grid().dim);
    out[j] = s > 0.0 ? phi.derivative(s) * x[axis] / s : 0.0;
  }
  return out;
}

}  // namespace test_support
