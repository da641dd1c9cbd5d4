#include "lojvar/error.hpp"

namespace lojvar {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_discretization: return "invalid_discretization";
    case ErrorCode::length_mismatch: return "length_mismatch";
    case ErrorCode::index_out_of_range: return "index_out_of_range";
    case ErrorCode::outside_tube: return "outside_tube";
    case ErrorCode::not_converged: return "not_converged";
    case ErrorCode::not_on_manifold: return "not_on_manifold";
    case ErrorCode::not_tangent: return "not_tangent";
    case ErrorCode::bundle_mismatch: return "bundle_mismatch";
    case ErrorCode::chart_violation: return "chart_violation";
    case ErrorCode::validity_violation: return "validity_violation";
    case ErrorCode::validation_failed: return "validation_failed";
    case ErrorCode::no_spectral_gap: return "no_spectral_gap";
    case ErrorCode::singular_system: return "singular_system";
    case ErrorCode::outside_neighborhood: return "outside_neighborhood";
    case ErrorCode::insufficient_data: return "insufficient_data";
    case ErrorCode::fit_out_of_range: return "fit_out_of_range";
    case ErrorCode::stability_violation: return "stability_violation";
    case ErrorCode::divergence: return "divergence";
    case ErrorCode::empty_zero_set: return "empty_zero_set";
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::config_error: return "config_error";
    case ErrorCode::io_error: return "io_error";
  }
  return "unknown";
}

}  // namespace lojvar
