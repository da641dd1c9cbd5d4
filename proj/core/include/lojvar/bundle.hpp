#pragma once

#include <memory>
#include <vector>

#include "lojvar/domain_mesh.hpp"
#include "lojvar/rng.hpp"
#include "lojvar/target_manifold.hpp"
#include "lojvar/types.hpp"

namespace lojvar {

/// Pullback bundle φ₀*TN over a circle mesh, stored as per-node tangent
/// projectors plus an orthonormal fiber basis at each node.
struct PullbackBundle {
  DomainMesh mesh;
  TargetManifold target;
  NodeField base_map;
  std::vector<Mat> projectors;
  /// p×(p-1) orthonormal basis of each fiber.
  std::vector<Mat> fiber_bases;

  int size() const noexcept { return mesh.size(); }
  int ambient_dim() const noexcept { return target.ambient_dim(); }
  int fiber_dim() const noexcept { return target.ambient_dim() - 1; }

  /// Applies P_ω nodewise.
  NodeField project(const NodeField& raw) const;
  /// Fiber coordinates (n·(p-1), node-major) of a fiberwise tangent field.
  Vec to_fiber_coords(const NodeField& values) const;
  NodeField from_fiber_coords(const Vec& coords) const;
};

using BundlePtr = std::shared_ptr<const PullbackBundle>;

BundlePtr build_pullback_bundle(const DomainMesh& mesh, const TargetManifold& target,
                                const NodeField& base_map);

class BundleSection {
 public:
  /// Validates the fiber constraint P_ω v_ω = v_ω within 1e-10.
  BundleSection(BundlePtr bundle, NodeField values);

  static BundleSection zero(const BundlePtr& bundle);

  const BundlePtr& bundle() const noexcept { return bundle_; }
  const NodeField& values() const noexcept { return values_; }

  BundleSection operator+(const BundleSection& other) const;
  BundleSection operator-(const BundleSection& other) const;
  BundleSection operator*(double a) const;

 private:
  struct Trusted {};
  BundleSection(BundlePtr bundle, NodeField values, Trusted);
  friend BundleSection project_section(const BundlePtr&, const NodeField&);

  BundlePtr bundle_;
  NodeField values_;
};

inline BundleSection operator*(double a, const BundleSection& s) { return s * a; }

BundleSection project_section(const BundlePtr& bundle, const NodeField& raw);

/// ∇^V u = τ ⊗ P_ω(∇_τ u), stored as the frame and the projected derivative.
struct BundleGradient {
  Eigen::Matrix<double, Eigen::Dynamic, 2, Eigen::RowMajor> frames;
  NodeField derivatives;

  /// τ_i (P ∇_τ u)_iᵀ as a 2×p matrix.
  Mat tensor(int i) const;
};

/// frame_sign = -1 uses the opposite orientation -τ.
BundleGradient bundle_gradient(const BundleSection& section, int frame_sign = 1);

/// Same tensor assembled as Σ_j (∇ u^j) ⊗ P_ω e_j.
BundleGradient bundle_gradient_components(const BundleSection& section);

double l2_inner(const BundleSection& a, const BundleSection& b);

struct SobolevNorms {
  double l2 = 0.0;
  double w12 = 0.0;
  double w22 = 0.0;
};

SobolevNorms sobolev_norms(const BundleSection& section);
/// Discrete norms of a raw node field on the given mesh.
SobolevNorms sobolev_norms(const DomainMesh& mesh, const NodeField& values);
/// max|u| + max|∇u| + max|∇²u|.
double c2_norm(const DomainMesh& mesh, const NodeField& values);
double c0_norm(const NodeField& values);

/// Section ũ with Π(φ₀ + ũ) = u. Throws chart_violation when u leaves the chart.
BundleSection chart_encode(const BundlePtr& bundle, const NodeField& u);
/// Π(φ₀ + ũ) nodewise. Throws outside_tube.
NodeField chart_decode(const BundleSection& section);

/// Smooth random section built from harmonics 0..modes, projected and scaled
/// to the requested C⁰ norm.
BundleSection smooth_random_section(const BundlePtr& bundle, Rng& rng, int modes, double c0_size);

}  // namespace lojvar
