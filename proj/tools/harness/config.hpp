#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lojvar/flow.hpp"
#include "lojvar/polynomial.hpp"
#include "lojvar/reduction.hpp"

namespace lojvar::harness {

struct DomainConfig {
  int n_nodes = 128;
  int diff_order = 2;
};

struct TargetConfig {
  std::string kind = "sphere";
  int ambient_dim = 3;
  std::vector<double> semi_axes;
  std::optional<double> tube_radius;
};

struct BaseMapConfig {
  int degree = 1;
  std::string file;
};

struct PerturbationConfig {
  std::uint64_t seed = 0;
  double amplitude = 0.05;
  int mode_count = 3;
};

struct ReductionConfig {
  double kernel_tol = 1e-6;
  double newton_tol = 1e-10;
  int newton_max_iter = 50;
  double quartic_penalty = 0.0;
  std::vector<double> probe_radii{0.005, 0.01, 0.02};
  int sandwich_samples = 20;
};

struct LojasiewiczConfig {
  std::vector<double> radii{0.005, 0.01, 0.02};
  int samples_per_radius = 8;
  std::vector<double> amplitudes{0.04, 0.02, 0.01, 0.005};
  double theta_claim = 0.5;
};

struct OutputConfig {
  std::string directory = "out";
  int stride = 1;
};

struct FinitePolynomial {
  std::string name;
  Polynomial polynomial{1, {}};
  std::vector<double> critical_point;
  std::vector<double> box_lo;
  std::vector<double> box_hi;
  int grid_n = 41;
};

struct FiniteConfig {
  std::vector<FinitePolynomial> polynomials;
  std::vector<double> radii{1e-3, 2e-3, 5e-3, 1e-2, 2e-2, 5e-2, 1e-1};
  int samples_per_radius = 64;
};

struct RunConfig {
  DomainConfig domain;
  TargetConfig target;
  BaseMapConfig base_map;
  PerturbationConfig perturbation;
  FlowConfig flow;
  ReductionConfig reduction;
  LojasiewiczConfig lojasiewicz;
  OutputConfig output;
  FiniteConfig finite;
};

/// Parses and validates a JSON configuration. Missing fields take defaults;
/// unknown keys and out-of-range values raise config_error naming the field.
RunConfig parse_config(const std::string& text);

/// Fully resolved configuration, as written to config_echo.json.
nlohmann::ordered_json config_to_json(const RunConfig& config);

ReductionSettings reduction_settings(const RunConfig& config);

}  // namespace lojvar::harness
