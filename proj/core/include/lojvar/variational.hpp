#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "lojvar/bundle.hpp"
#include "lojvar/domain_mesh.hpp"
#include "lojvar/target_manifold.hpp"
#include "lojvar/types.hpp"

namespace lojvar {

/// A discretized map from the circle into the target.
struct MapState {
  /// Validates that every value lies on the target within 1e-10.
  MapState(DomainMesh mesh, TargetManifold target, NodeField values);

  DomainMesh mesh;
  TargetManifold target;
  NodeField values;
};

/// Degree-k great circle θ ↦ (cos kθ, sin kθ, 0, ...) into the unit sphere.
NodeField great_circle(const DomainMesh& mesh, int ambient_dim, int degree);

/// Degree-k constant-speed parametrization of the equator in the x-y plane.
/// For the sphere this is the great circle; for an ellipsoid the ellipse
/// (c₀ cos s, c₁ sin s, 0, ...) reparametrized by arclength, which is a
/// closed geodesic and hence harmonic.
NodeField equatorial_geodesic(const DomainMesh& mesh, const TargetManifold& target, int degree);

/// Σ_i h |D_h u_i|² with the mesh's central-difference stencil.
double energy(const MapState& map);

/// Σ_e h |(u_{e+1} - u_e)/h|², the staggered-grid energy that bundle
/// functionals are built on.
double energy_compact(const MapState& map);

/// M_E = P_u(D_h D_h u). The second fundamental form term is normal, so the
/// projection removes it; with this stencil dE(u)[ξ] = -2⟨M_E, ξ⟩ exactly.
NodeField tension_field(const MapState& map);

double l2_norm(const DomainMesh& mesh, const NodeField& f);
double l2_inner(const DomainMesh& mesh, const NodeField& a, const NodeField& b);

struct VariationCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double mismatch = 0.0;
};

/// lhs: central difference of s ↦ E(Π(u + sξ)); rhs: -2⟨M_E(u), ξ⟩.
VariationCheck first_variation_check(const MapState& map, const NodeField& direction,
                                     double step = 1e-5);

/// Location passed to integrands: edge index and its midpoint angle.
struct EdgePoint {
  int edge = 0;
  double angle = 0.0;
};

using Integrand = std::function<double(const EdgePoint&, const Vec& z, const Vec& eta)>;
using IntegrandPartial = std::function<Vec(const EdgePoint&, const Vec& z, const Vec& eta)>;

/// Functional F(v) = Σ_e h F(ω_e, z_e, η_e) where z_e is the edge average of
/// v and η_e its forward difference.
struct FunctionalSpec {
  Integrand integrand;
  IntegrandPartial partial_z;
  IntegrandPartial partial_eta;
  std::string label;
  double validity_radius = 0.0;
  int ambient_dim = 0;
  int edge_count = 0;
  /// Probe radii used by validate().
  double z_probe_radius = 0.1;
  double eta_probe_radius = 1.0;
};

/// Compares partials with central differences of the integrand at 100 seeded
/// probes; throws validation_failed beyond 1e-6 (relative to max(1, |∂F|)).
void validate(const FunctionalSpec& spec, std::uint64_t seed = 0x5eed);

double functional_value(const FunctionalSpec& spec, const BundleSection& section);

/// Fiberwise projected L² gradient: ⟨M_F(v), w⟩ = dF(v)[w].
BundleSection general_euler_lagrange(const FunctionalSpec& spec, const BundleSection& section);

/// Energy of Π(φ₀ + v) minus the energy of φ₀, as an edge-local integrand.
FunctionalSpec energy_functional_on_bundle(const BundlePtr& bundle);

/// F + μ|z|⁴.
FunctionalSpec with_quartic_penalty(FunctionalSpec spec, double mu);
/// F(ω, z, η) = |η|².
FunctionalSpec dirichlet_model_functional(int ambient_dim, int edge_count, double validity_radius);

/// (n·p)×(n·p) central-difference Jacobian of M_F, node-major, with inputs
/// perturbed along fiber directions P_ω e_j.
Mat linearization_matrix(const FunctionalSpec& spec, const BundleSection& at, double eps = 1e-6);

struct RemainderCheck {
  double remainder = 0.0;
  double product = 0.0;
};

/// remainder = ‖M(u1) - M(u2) - L0(u1 - u2)‖, product = (‖u1‖_C² + ‖u2‖_C²)‖u1 - u2‖_W22.
RemainderCheck quadratic_remainder_check(const FunctionalSpec& spec, const Mat& L0,
                                         const BundleSection& u1, const BundleSection& u2);

struct EllipticityProbe {
  EdgePoint at;
  Vec z;
  Vec eta;
  Eigen::Vector2d xi;
  Vec lambda;
};

/// True iff λᵀ F_ηη λ (ξ·τ)² > 0 on every probe with nonzero ξ·τ and λ.
bool ellipticity_check(const FunctionalSpec& spec, const std::vector<EllipticityProbe>& probes);

}  // namespace lojvar
