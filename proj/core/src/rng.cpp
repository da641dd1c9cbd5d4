#include "lojvar/rng.hpp"

#include <cmath>
#include <numbers>

namespace lojvar {

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  // 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Vec Rng::unit_vector(Eigen::Index dim) {
  Vec v(dim);
  do {
    for (Eigen::Index i = 0; i < dim; ++i) v(i) = normal();
  } while (v.norm() < 1e-12);
  return v / v.norm();
}

}  // namespace lojvar
