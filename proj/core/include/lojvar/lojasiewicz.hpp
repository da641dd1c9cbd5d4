#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "lojvar/polynomial.hpp"
#include "lojvar/reduction.hpp"
#include "lojvar/types.hpp"

namespace lojvar {

/// Values and gradient norms at or below this are excluded from fits.
inline constexpr double kFitFloor = 1e-13;

enum class Provenance { flow_trajectory, random_perturbation, grid, sphere_sampling };

std::string_view to_string(Provenance p);

struct SamplePair {
  double value_gap = 0.0;
  double gradient_norm = 0.0;
};

struct SampleCloud {
  std::vector<SamplePair> pairs;
  Provenance provenance = Provenance::grid;
};

struct ExponentFit {
  double theta = 0.0;
  double constant = 0.0;
  double r_squared = 0.0;
  int sample_count = 0;
  int noise_floor_hits = 0;
};

/// OLS of log g = θ log v + log(1/C). Needs ≥ 10 usable pairs spanning two
/// decades of value gap.
ExponentFit estimate_gradient_exponent(const SampleCloud& cloud);

struct InequalityReport {
  double theta_claim = 0.0;
  /// max v^θ / g over usable samples.
  double c_min = 0.0;
  /// 2 · C_min of the first half.
  double holdout_constant = 0.0;
  /// Fraction of the second half satisfying v^θ ≤ holdout_constant · g.
  double holdout_pass_fraction = 0.0;
  /// Slope of log(v^θ / g) against log v; strongly negative means the ratio
  /// blows up as v → 0.
  double trend_slope = 0.0;
  bool diverging = false;
  int usable = 0;
  int excluded = 0;
};

InequalityReport verify_inequality(const SampleCloud& cloud, double theta_claim);

/// Brute-force gradient exponent at a critical point: samples spheres of the
/// given radii (±axes plus seeded random directions) and takes the smallest θ
/// for which the worst-case ratio |f - f(x*)|^θ / |∇f| stays bounded.
ExponentFit finite_dim_gradient_exponent(const Polynomial& f, const Vec& critical_point,
                                         const std::vector<double>& radii,
                                         int samples_per_radius = 64, std::uint64_t seed = 0);

/// Sample cloud used by finite_dim_gradient_exponent.
SampleCloud finite_dim_cloud(const Polynomial& f, const Vec& critical_point,
                             const std::vector<double>& radii, int samples_per_radius,
                             std::uint64_t seed);

struct DistanceFit {
  double alpha = 0.0;
  double constant = 0.0;
  double r_squared = 0.0;
  int sample_count = 0;
  int zero_set_size = 0;
};

/// Fits dist(x, Z)^α ≤ C|f(x)| on a grid over the box [lo, hi].
DistanceFit finite_dim_distance_exponent(const Polynomial& f, const Vec& lo, const Vec& hi,
                                         int grid_n);

struct IntegrabilityRow {
  double radius = 0.0;
  double max_abs_f = 0.0;
  bool pass = false;
  std::string error;
};

struct IntegrabilityReport {
  double tau = 0.0;
  std::vector<IntegrabilityRow> rows;
  bool integrable = false;
};

/// max |f(ξ)| over sampled |ξ| = r against τ r².
IntegrabilityReport integrability_probe(const ReductionWorkspace& ws, const std::vector<double>& radii,
                                        int samples_per_radius = 8, double tau = 1e-4,
                                        std::uint64_t seed = 0);

/// Pairs (|F(v)|, ‖M_F(v)‖) for seeded smooth kernel-orthogonal sections v at
/// each C⁰ amplitude.
SampleCloud perturbation_cloud(const ReductionWorkspace& ws, const std::vector<double>& amplitudes,
                               int per_amplitude, std::uint64_t seed);

}  // namespace lojvar
