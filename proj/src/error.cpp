#include "cavreg/error.hpp"

namespace cavreg {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_parameters: return "invalid-parameters";
    case ErrorKind::degenerate_fit: return "degenerate-fit";
    case ErrorKind::insufficient_atoms: return "insufficient-atoms";
    case ErrorKind::unroutable: return "unroutable";
    case ErrorKind::invalid_slot: return "invalid-slot";
    case ErrorKind::empty_envelope: return "empty-envelope";
    case ErrorKind::unmatched_basis: return "unmatched-basis";
    case ErrorKind::missing_basis: return "missing-basis";
    case ErrorKind::out_of_range: return "out-of-range";
    case ErrorKind::config_invalid: return "config-invalid";
    case ErrorKind::calibration_missing: return "calibration-missing";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace cavreg
