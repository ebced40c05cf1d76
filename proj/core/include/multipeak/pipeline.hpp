#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "multipeak/config.hpp"

namespace multipeak {

enum class Command { constants, ground_state, ansatz, reduce, solve, rescale, validate, sweep };

std::optional<Command> parse_command(std::string_view name);
std::string_view to_string(Command command);

/// Ground states shared across a sweep, keyed by their solver parameters.
class ProfileCache {
 public:
  std::shared_ptr<const RadialProfile> get(const GroundStateParams& params);

 private:
  std::mutex mutex_;
  std::map<std::string, std::shared_ptr<const RadialProfile>> profiles_;
};

std::string profile_key(const GroundStateParams& params);

/// A pass/fail assertion recorded in the reports.
struct Check {
  std::string name;
  bool passed;
  double value;
  double bound;
};

/// Scan, minimizer and assembled solution at one coupling.
struct EtaSolve {
  ReducedScan scan;
  Solution solution;
};

/// Full reduction at one coupling: scan, auxiliary solve at the minimizer
/// and solution assembly.
EtaSolve solve_eta(const RunConfig& config, const RadialProfile& profile, double eta);

/// Interior minimizer, auxiliary residual, ||nu|| <= 2 C ||grad S(W)|| and
/// sign change.
std::vector<Check> solution_checks(const EtaSolve& result);

/// Runs a subcommand: writes its artifacts under config.out and returns the
/// exit code, 0 when every recorded check passes and 3 otherwise.
/// Configuration errors propagate as exceptions.
int run_command(Command command, const RunConfig& config, std::ostream& log);

/// Exit code for an exception escaping run_command: 2 for configuration
/// problems, 3 for numerical failures.
int exit_code_for(const std::exception& error);

/// `name_value.csv` with value printed to six significant digits.
std::string tagged_name(std::string_view name, double value, std::string_view extension);

}  // namespace multipeak
