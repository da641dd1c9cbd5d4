#pragma once

#include <Eigen/Dense>

namespace lojvar {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// One row per mesh node, one column per ambient coordinate. Row-major so a
// field flattens node-major without copying.
using NodeField = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline Eigen::Map<const Vec> flatten(const NodeField& f) {
  return Eigen::Map<const Vec>(f.data(), f.size());
}

inline NodeField unflatten(const Vec& v, Eigen::Index rows, Eigen::Index cols) {
  return Eigen::Map<const NodeField>(v.data(), rows, cols);
}

}  // namespace lojvar
