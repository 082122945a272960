#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cavreg {

enum class ErrorKind {
  invalid_parameters,
  degenerate_fit,
  insufficient_atoms,
  unroutable,
  invalid_slot,
  empty_envelope,
  unmatched_basis,
  missing_basis,
  out_of_range,
  config_invalid,
  calibration_missing,
  io,
};

std::string_view to_string(ErrorKind kind) noexcept;

// All library failures are reported as cavreg::Error carrying a kind that
// callers (the CLI in particular) can map to exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace cavreg
