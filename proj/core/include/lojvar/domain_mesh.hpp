#pragma once

#include <Eigen/Dense>
#include <vector>

#include "lojvar/types.hpp"

namespace lojvar {

/// Uniform periodic discretization of the unit circle.
///
/// Nodes sit at θ_i = 2πi/n with trapezoid weights h = 2π/n. Differentiation
/// uses periodic central stencils of order 2 or 4.
class DomainMesh {
 public:
  static DomainMesh circle(int n_nodes, int diff_order = 2);

  int size() const noexcept { return n_; }
  double spacing() const noexcept { return h_; }
  int diff_order() const noexcept { return order_; }
  const Vec& angles() const noexcept { return angles_; }
  const Vec& weights() const noexcept { return weights_; }
  double angle(int i) const;

  /// Periodic central-difference d/dθ.
  Vec differentiate(const Vec& f) const;
  /// Columnwise d/dθ of a node field.
  NodeField differentiate(const NodeField& f) const;

  /// Periodic second difference d²/dθ².
  Vec laplace_beltrami(const Vec& f) const;
  NodeField laplace_beltrami(const NodeField& f) const;

  double integrate(const Vec& f) const;

  Eigen::Vector2d position(int i) const;
  Eigen::Vector2d tangent_frame(int i) const;
  Eigen::Vector2d mean_curvature(int i) const;

  /// Forward difference (f_{i+1} - f_i)/h, attached to edge i.
  NodeField forward_difference(const NodeField& f) const;
  /// Edge average (f_i + f_{i+1})/2.
  NodeField edge_average(const NodeField& f) const;
  /// Angle of the midpoint of edge e, (e + 1/2)h.
  double edge_angle(int e) const;

  int wrap(int i) const noexcept { return ((i % n_) + n_) % n_; }

 private:
  DomainMesh(int n, int order);
  void check_index(int i) const;
  void check_length(Eigen::Index len) const;

  int n_;
  int order_;
  double h_;
  Vec angles_;
  Vec weights_;
};

/// Free-function spelling of DomainMesh::circle.
inline DomainMesh build_circle_mesh(int n_nodes, int diff_order) {
  return DomainMesh::circle(n_nodes, diff_order);
}

}  // namespace lojvar
