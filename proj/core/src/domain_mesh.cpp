#include "lojvar/domain_mesh.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "lojvar/error.hpp"

namespace lojvar {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

DomainMesh DomainMesh::circle(int n_nodes, int diff_order) {
  if (n_nodes < 8) {
    throw Error(ErrorCode::invalid_discretization,
                "circle mesh needs at least 8 nodes, got " + std::to_string(n_nodes));
  }
  if (diff_order != 2 && diff_order != 4) {
    throw Error(ErrorCode::invalid_discretization,
                "unsupported stencil order " + std::to_string(diff_order));
  }
  return DomainMesh(n_nodes, diff_order);
}

DomainMesh::DomainMesh(int n, int order)
    : n_(n), order_(order), h_(kTwoPi / n), angles_(n), weights_(Vec::Constant(n, kTwoPi / n)) {
  for (int i = 0; i < n; ++i) angles_(i) = kTwoPi * i / n;
}

void DomainMesh::check_index(int i) const {
  if (i < 0 || i >= n_) {
    throw Error(ErrorCode::index_out_of_range,
                "node " + std::to_string(i) + " outside [0, " + std::to_string(n_) + ")");
  }
}

void DomainMesh::check_length(Eigen::Index len) const {
  if (len != n_) {
    throw Error(ErrorCode::length_mismatch, "field has " + std::to_string(len) +
                                                " entries, mesh has " + std::to_string(n_));
  }
}

double DomainMesh::angle(int i) const {
  check_index(i);
  return angles_(i);
}

Vec DomainMesh::differentiate(const Vec& f) const {
  check_length(f.size());
  Vec out(n_);
  if (order_ == 2) {
    const double s = 1.0 / (2.0 * h_);
    for (int i = 0; i < n_; ++i) out(i) = (f(wrap(i + 1)) - f(wrap(i - 1))) * s;
  } else {
    const double s = 1.0 / (12.0 * h_);
    for (int i = 0; i < n_; ++i) {
      out(i) = (-f(wrap(i + 2)) + 8.0 * f(wrap(i + 1)) - 8.0 * f(wrap(i - 1)) + f(wrap(i - 2))) * s;
    }
  }
  return out;
}

NodeField DomainMesh::differentiate(const NodeField& f) const {
  check_length(f.rows());
  NodeField out(f.rows(), f.cols());
  for (Eigen::Index c = 0; c < f.cols(); ++c) out.col(c) = differentiate(Vec(f.col(c)));
  return out;
}

Vec DomainMesh::laplace_beltrami(const Vec& f) const {
  check_length(f.size());
  Vec out(n_);
  if (order_ == 2) {
    const double s = 1.0 / (h_ * h_);
    for (int i = 0; i < n_; ++i) out(i) = (f(wrap(i + 1)) - 2.0 * f(i) + f(wrap(i - 1))) * s;
  } else {
    const double s = 1.0 / (12.0 * h_ * h_);
    for (int i = 0; i < n_; ++i) {
      out(i) = (-f(wrap(i + 2)) + 16.0 * f(wrap(i + 1)) - 30.0 * f(i) + 16.0 * f(wrap(i - 1)) -
                f(wrap(i - 2))) *
               s;
    }
  }
  return out;
}

NodeField DomainMesh::laplace_beltrami(const NodeField& f) const {
  check_length(f.rows());
  NodeField out(f.rows(), f.cols());
  for (Eigen::Index c = 0; c < f.cols(); ++c) out.col(c) = laplace_beltrami(Vec(f.col(c)));
  return out;
}

double DomainMesh::integrate(const Vec& f) const {
  check_length(f.size());
  return weights_.dot(f);
}

Eigen::Vector2d DomainMesh::position(int i) const {
  const double t = angle(i);
  return {std::cos(t), std::sin(t)};
}

Eigen::Vector2d DomainMesh::tangent_frame(int i) const {
  const double t = angle(i);
  return {-std::sin(t), std::cos(t)};
}

Eigen::Vector2d DomainMesh::mean_curvature(int i) const { return -position(i); }

NodeField DomainMesh::forward_difference(const NodeField& f) const {
  check_length(f.rows());
  NodeField out(f.rows(), f.cols());
  for (int e = 0; e < n_; ++e) out.row(e) = (f.row(wrap(e + 1)) - f.row(e)) / h_;
  return out;
}

NodeField DomainMesh::edge_average(const NodeField& f) const {
  check_length(f.rows());
  NodeField out(f.rows(), f.cols());
  for (int e = 0; e < n_; ++e) out.row(e) = 0.5 * (f.row(wrap(e + 1)) + f.row(e));
  return out;
}

double DomainMesh::edge_angle(int e) const {
  check_index(e);
  return (e + 0.5) * h_;
}

}  // namespace lojvar
