#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "lojvar/types.hpp"

namespace lojvar {

/// Seedable generator with a fully specified output stream.
///
/// Raw draws come from std::mt19937_64 (whose sequence the C++ standard
/// fixes). Uniforms take the top 53 bits of each draw; normals use the basic
/// Box-Muller transform, one normal per pair of uniforms. No
/// implementation-defined std distributions are involved, so another language
/// can reproduce the same samples.
class Rng {
 public:
  static constexpr std::string_view algorithm = "mt19937_64/top53/box-muller";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform();
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  /// Uniformly distributed unit vector in R^dim.
  Vec unit_vector(Eigen::Index dim);

 private:
  std::mt19937_64 engine_;
};

}  // namespace lojvar
