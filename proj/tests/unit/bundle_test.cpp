#include "lojvar/bundle.hpp"

#include "lojvar/rng.hpp"
#include "lojvar/variational.hpp"
#include "support.hpp"

namespace lojvar {
namespace {

using test::kPi;

BundlePtr sphere_bundle(int n = 64) {
  const auto mesh = DomainMesh::circle(n);
  return build_pullback_bundle(mesh, TargetManifold::sphere(3), great_circle(mesh, 3, 1));
}

BundlePtr ellipsoid_bundle(int n = 64) {
  const auto mesh = DomainMesh::circle(n);
  const auto target = TargetManifold::ellipsoid((Vec(3) << 1.5, 1.0, 0.8).finished());
  return build_pullback_bundle(mesh, target, equatorial_geodesic(mesh, target, 1));
}

NodeField random_field(int n, int p, Rng& rng) {
  NodeField f(n, p);
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < p; ++a) f(i, a) = rng.normal();
  return f;
}

TEST(PullbackBundle, GreatCircleProjectorsHaveRankTwo) {
  const auto b = sphere_bundle();
  for (int i = 0; i < b->size(); ++i) {
    const Mat& P = b->projectors[i];
    EXPECT_NEAR(P.trace(), 2.0, 1e-12);
    EXPECT_LT((P * P - P).norm(), 1e-12);
    EXPECT_LT((P - P.transpose()).norm(), 1e-12);
    EXPECT_LT((P * b->base_map.row(i).transpose()).norm(), 1e-12);
  }
}

TEST(PullbackBundle, RejectsOffManifoldBase) {
  const auto mesh = DomainMesh::circle(16);
  NodeField base = great_circle(mesh, 3, 1);
  base(3, 2) = 0.01;
  EXPECT_LOJVAR_ERROR(build_pullback_bundle(mesh, TargetManifold::sphere(3), base), not_on_manifold);
}

TEST(BundleSection, ProjectSection) {
  const auto b = sphere_bundle(32);
  Rng rng(1);
  const BundleSection s = project_section(b, random_field(32, 3, rng));
  EXPECT_LT((project_section(b, s.values()).values() - s.values()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT(project_section(b, b->base_map).values().cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LOJVAR_ERROR(project_section(b, NodeField::Zero(31, 3)), length_mismatch);
  EXPECT_LOJVAR_ERROR(BundleSection(b, b->base_map), not_tangent);
}

TEST(BundleSection, FiberCoordinatesRoundTrip) {
  const auto b = ellipsoid_bundle(32);
  Rng rng(2);
  const BundleSection s = project_section(b, random_field(32, 3, rng));
  EXPECT_LT((b->from_fiber_coords(b->to_fiber_coords(s.values())) - s.values()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(BundleSection, ArithmeticChecksBundle) {
  const auto b1 = sphere_bundle(16);
  const auto b2 = sphere_bundle(16);
  EXPECT_LOJVAR_ERROR(BundleSection::zero(b1) + BundleSection::zero(b2), bundle_mismatch);
  EXPECT_LOJVAR_ERROR(l2_inner(BundleSection::zero(b1), BundleSection::zero(b2)), bundle_mismatch);
}

TEST(BundleGradient, ConstantSectionOverConstantBaseIsZero) {
  const auto mesh = DomainMesh::circle(16);
  NodeField base = NodeField::Zero(16, 3);
  base.col(2).setOnes();
  const auto b = build_pullback_bundle(mesh, TargetManifold::sphere(3), base);
  NodeField v = NodeField::Zero(16, 3);
  v.col(0).setConstant(0.3);
  const BundleGradient g = bundle_gradient(BundleSection(b, v));
  EXPECT_LT(g.derivatives.cwiseAbs().maxCoeff(), 1e-15);
}

TEST(BundleGradient, FrameSignDoesNotChangeTensor) {
  const auto b = sphere_bundle(32);
  Rng rng(3);
  const BundleSection s = smooth_random_section(b, rng, 4, 0.1);
  const auto g1 = bundle_gradient(s, 1);
  const auto g2 = bundle_gradient(s, -1);
  for (int i = 0; i < 32; ++i) EXPECT_LT((g1.tensor(i) - g2.tensor(i)).norm(), 1e-15);
}

TEST(BundleGradient, LinearInSection) {
  const auto b = ellipsoid_bundle(32);
  Rng rng(4);
  const BundleSection s = smooth_random_section(b, rng, 4, 0.1);
  const BundleSection t = smooth_random_section(b, rng, 4, 0.1);
  const NodeField lhs = bundle_gradient(2.0 * s - 0.5 * t).derivatives;
  const NodeField rhs = 2.0 * bundle_gradient(s).derivatives - 0.5 * bundle_gradient(t).derivatives;
  EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(BundleGradientProperty, ComponentAssemblyAgrees) {
  Rng rng(5);
  for (const auto& b : {sphere_bundle(48), ellipsoid_bundle(48)}) {
    for (int k = 0; k < 10; ++k) {
      const BundleSection s = smooth_random_section(b, rng, 5, 0.2);
      const auto direct = bundle_gradient(s);
      const auto comps = bundle_gradient_components(s);
      for (int i = 0; i < 48; ++i) EXPECT_LT((direct.tensor(i) - comps.tensor(i)).norm(), 1e-12);
    }
  }
}

TEST(L2Inner, Axioms) {
  const auto b = sphere_bundle(32);
  Rng rng(6);
  const BundleSection s = smooth_random_section(b, rng, 3, 0.3);
  const BundleSection t = smooth_random_section(b, rng, 3, 0.3);
  EXPECT_GT(l2_inner(s, s), 0.0);
  EXPECT_EQ(l2_inner(BundleSection::zero(b), BundleSection::zero(b)), 0.0);
  EXPECT_NEAR(l2_inner(s, t), l2_inner(t, s), 1e-15);
  // e3 is tangent everywhere along the equator and has unit length.
  NodeField e3 = NodeField::Zero(32, 3);
  e3.col(2).setOnes();
  const BundleSection u(b, e3);
  EXPECT_NEAR(l2_inner(u, u), 2 * kPi, 1e-12);
}

TEST(SobolevNorms, Examples) {
  const auto b = sphere_bundle(32);
  const auto z = sobolev_norms(BundleSection::zero(b));
  EXPECT_EQ(z.l2, 0.0);
  EXPECT_EQ(z.w12, 0.0);
  EXPECT_EQ(z.w22, 0.0);
  NodeField e3 = NodeField::Zero(32, 3);
  e3.col(2).setConstant(0.01);
  EXPECT_NEAR(sobolev_norms(BundleSection(b, e3)).l2, 0.01 * std::sqrt(2 * kPi), 1e-10);
  Rng rng(7);
  for (int k = 0; k < 10; ++k) {
    const auto n = sobolev_norms(smooth_random_section(b, rng, 4, 0.1));
    EXPECT_LE(n.l2, n.w12);
    EXPECT_LE(n.w12, n.w22);
  }
}

TEST(Chart, SphereExamples) {
  const auto b = sphere_bundle(32);
  EXPECT_LT(chart_encode(b, b->base_map).values().cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((chart_decode(BundleSection::zero(b)) - b->base_map).cwiseAbs().maxCoeff(), 1e-15);

  Rng rng(8);
  const NodeField u = chart_decode(smooth_random_section(b, rng, 3, 0.3));
  const BundleSection enc = chart_encode(b, u);
  EXPECT_LT((chart_decode(enc) - u).cwiseAbs().maxCoeff(), 1e-12);
  // Closed form u/(u·φ₀) - φ₀.
  for (int i = 0; i < 32; ++i) {
    const Vec ui = u.row(i).transpose();
    const Vec phi = b->base_map.row(i).transpose();
    EXPECT_LT((enc.values().row(i).transpose() - (ui / ui.dot(phi) - phi)).norm(), 1e-12);
    EXPECT_LT((b->projectors[i] * enc.values().row(i).transpose() - enc.values().row(i).transpose()).norm(), 1e-12);
  }
}

TEST(Chart, Violations) {
  const auto b = sphere_bundle(16);
  NodeField u = b->base_map;
  u.row(5) = -u.row(5);
  EXPECT_LOJVAR_ERROR(chart_encode(b, u), chart_violation);

  NodeField v = NodeField::Zero(16, 3);
  v(3, 2) = 0.5;
  EXPECT_LOJVAR_ERROR(chart_decode(BundleSection(b, v)), outside_tube);
  v(3, 2) = 0.499;
  const NodeField near_edge = chart_decode(BundleSection(b, v));
  for (int i = 0; i < 16; ++i) EXPECT_NEAR(near_edge.row(i).norm(), 1.0, 1e-14);
}

TEST(ChartProperty, EncodeDecodeRoundTrip) {
  Rng rng(9);
  for (const auto& b : {sphere_bundle(32), ellipsoid_bundle(32)}) {
    const double size = b->target.kind() == TargetManifold::Kind::sphere ? 0.19 : 0.1;
    for (int k = 0; k < 100; ++k) {
      const BundleSection s = smooth_random_section(b, rng, 4, size * rng.uniform());
      const BundleSection back = chart_encode(b, chart_decode(s));
      EXPECT_LT((back.values() - s.values()).cwiseAbs().maxCoeff(), 1e-10);
    }
  }
}

TEST(SmoothRandomSection, RespectsSizeAndSeed) {
  const auto b = sphere_bundle(32);
  Rng r1(10);
  Rng r2(10);
  const BundleSection s1 = smooth_random_section(b, r1, 3, 0.05);
  const BundleSection s2 = smooth_random_section(b, r2, 3, 0.05);
  EXPECT_NEAR(c0_norm(s1.values()), 0.05, 1e-15);
  EXPECT_EQ((s1.values() - s2.values()).cwiseAbs().maxCoeff(), 0.0);
}

}  // namespace
}  // namespace lojvar
