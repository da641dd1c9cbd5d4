#pragma once

#include <optional>

#include "lojvar/types.hpp"

namespace lojvar {

/// Embedded target N in R^p: the unit sphere or an axis-aligned ellipsoid
/// Σ (x_a / c_a)² = 1.
class TargetManifold {
 public:
  enum class Kind { sphere, ellipsoid };

  static TargetManifold sphere(int ambient_dim, std::optional<double> tube_radius = {});
  static TargetManifold ellipsoid(const Vec& semi_axes, std::optional<double> tube_radius = {});

  Kind kind() const noexcept { return kind_; }
  int ambient_dim() const noexcept { return static_cast<int>(axes_.size()); }
  const Vec& semi_axes() const noexcept { return axes_; }
  double tube_radius() const noexcept { return delta_; }

  /// Defining function Σ (x_a/c_a)² - 1, zero on N.
  double level(const Vec& x) const;
  bool contains(const Vec& y, double tol = 1e-10) const;

  /// Nearest point Π(x). Throws outside_tube or not_converged.
  Vec project_nearest(const Vec& x) const;
  /// dΠ_x(v).
  Vec differential_of_projection(const Vec& x, const Vec& v) const;
  /// Full p×p Jacobian of Π at x (closed form for both kinds).
  Mat projection_jacobian(const Vec& x) const;

  /// Outward unit normal at y ∈ N.
  Vec unit_normal(const Vec& y) const;
  /// Orthogonal projector onto T_yN. Throws not_on_manifold.
  Mat tangent_projector(const Vec& y) const;
  /// A_y(X, Y) = -(D_X P) Y, normal valued. On the unit sphere this is (X·Y) y.
  Vec second_fundamental_form(const Vec& y, const Vec& X, const Vec& Y) const;

 private:
  TargetManifold(Kind kind, Vec axes, double delta);
  void check_dim(const Vec& x) const;
  void check_on(const Vec& y) const;
  Vec project_ellipsoid(const Vec& x) const;
  double ellipsoid_multiplier(const Vec& x) const;
  Mat projector_unchecked(const Vec& y) const;

  Kind kind_;
  Vec axes_;
  double delta_;
};

}  // namespace lojvar
