#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lojvar {

enum class ErrorCode {
  invalid_discretization,
  length_mismatch,
  index_out_of_range,
  outside_tube,
  not_converged,
  not_on_manifold,
  not_tangent,
  bundle_mismatch,
  chart_violation,
  validity_violation,
  validation_failed,
  no_spectral_gap,
  singular_system,
  outside_neighborhood,
  insufficient_data,
  fit_out_of_range,
  stability_violation,
  divergence,
  empty_zero_set,
  invalid_argument,
  config_error,
  io_error,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries a code so the CLI can emit a
// machine-readable record.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace lojvar
