#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "multipeak/ansatz.hpp"
#include "multipeak/estimate_validator.hpp"
#include "multipeak/reduction.hpp"

namespace multipeak {

/// One experiment, read from a flat `key = value` file. Lines starting with
/// '#' are comments; lists are comma separated. Unknown keys are errors.
struct RunConfig {
  int dim = 2;
  double p = 2.7;
  int peaks = 2;
  std::vector<int> signs;  // empty selects the alternating pattern
  std::vector<double> eta;
  std::optional<double> alpha;  // with omega: eta_i = alpha_omega(alpha, omega_i)
  std::vector<double> omega;
  std::optional<double> r;  // fixed radius for `ansatz` and `reduce`

  int grid_nodes = 0;       // 0 selects 512 (N = 2) or 128 (N = 3)
  double half_width = 0.0;  // 0 selects 64 (N = 2) or 56 (N = 3)

  double gs_s_max = 40.0;
  int gs_nodes = 10241;

  int scan_samples = 33;
  double interval_c = 0.0;
  double refine_relative = 1e-6;
  ReductionTolerances tolerances;

  ValidatorParams validator;

  std::filesystem::path out = "out";
  std::uint64_t seed = 20240611;
  int threads = 1;

  Dimension dimension() const { return Dimension(dim); }
  SignPattern pattern() const;
  GridSpec grid() const;
  GroundStateParams ground_state() const;
  ScanOptions scan_options() const;
  /// The coupling list, from `eta` or from `alpha` and `omega`.
  std::vector<double> eta_values() const;

  /// Exponent window, sign condition, grid and tolerances; raises a
  /// configuration or validation error before any computation.
  void validate() const;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical `key = value` text; parse_config(to_text(c)) reproduces c.
std::string to_text(const RunConfig& config);

}  // namespace multipeak
