#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace multipeak {

enum class ErrorKind {
  domain,
  singularity,
  configuration,
  validation,
  iteration_limit,
  tolerance,
  incompatible,
  geometry,
  range,
  degeneracy,
  non_contraction,
  boundary_minimum,
  peak_verification,
  resolution,
  fit_quality,
  io
};

std::string_view to_string(ErrorKind kind);

/// Base exception. `where` names the module, `expectation` names the
/// mathematical property that was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string where, std::string expectation,
        const std::string& detail);

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& where() const noexcept { return where_; }
  const std::string& expectation() const noexcept { return expectation_; }

  /// True for errors caused by user input rather than numerics.
  bool is_configuration_error() const noexcept {
    return kind_ == ErrorKind::configuration || kind_ == ErrorKind::validation;
  }

 private:
  ErrorKind kind_;
  std::string where_;
  std::string expectation_;
};

[[noreturn]] void raise(ErrorKind kind, std::string where,
                        std::string expectation, const std::string& detail);

}  // namespace multipeak
