#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "harness/config.hpp"

namespace lojvar::harness {

const std::vector<std::string>& subcommands();

/// Runs one subcommand, writing artifacts under out_dir (always including
/// config_echo.json). Human-facing output goes to `out`. Throws lojvar::Error
/// on failure.
void dispatch(const std::string& subcommand, const RunConfig& config, const std::filesystem::path& out_dir,
              std::ostream& out);

/// Built-in polynomials used by finite-verify when the config lists none:
/// x², x⁴, x² + y⁴ and x²y².
std::vector<FinitePolynomial> default_polynomials();

}  // namespace lojvar::harness
