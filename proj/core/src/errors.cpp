#include "multipeak/errors.hpp"

namespace multipeak {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::domain: return "domain error";
    case ErrorKind::singularity: return "singularity error";
    case ErrorKind::configuration: return "configuration error";
    case ErrorKind::validation: return "validation error";
    case ErrorKind::iteration_limit: return "iteration-limit error";
    case ErrorKind::tolerance: return "tolerance error";
    case ErrorKind::incompatible: return "incompatibility error";
    case ErrorKind::geometry: return "geometry error";
    case ErrorKind::range: return "range error";
    case ErrorKind::degeneracy: return "degeneracy error";
    case ErrorKind::non_contraction: return "non-contraction error";
    case ErrorKind::boundary_minimum: return "boundary-minimum error";
    case ErrorKind::peak_verification: return "peak-verification error";
    case ErrorKind::resolution: return "resolution error";
    case ErrorKind::fit_quality: return "fit-quality error";
    case ErrorKind::io: return "io error";
  }
  return "error";
}

Error::Error(ErrorKind kind, std::string where, std::string expectation,
             const std::string& detail)
    : std::runtime_error(std::string(to_string(kind)) + " in " + where + " [" +
                         expectation + "]: " + detail),
      kind_(kind),
      where_(std::move(where)),
      expectation_(std::move(expectation)) {}

void raise(ErrorKind kind, std::string where, std::string expectation,
           const std::string& detail) {
  throw Error(kind, std::move(where), std::move(expectation), detail);
}

}  // namespace multipeak
