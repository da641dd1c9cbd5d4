#include "lojvar/target_manifold.hpp"

#include "lojvar/rng.hpp"
#include "support.hpp"

namespace lojvar {
namespace {

Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }
Vec v3(double a, double b, double c) { return (Vec(3) << a, b, c).finished(); }

TargetManifold ellipsoid3() { return TargetManifold::ellipsoid(v3(1.5, 1.0, 0.8)); }

// Random point on the ellipsoid via radial scaling of a random direction.
Vec random_on(const TargetManifold& t, Rng& rng) {
  Vec d = rng.unit_vector(t.ambient_dim());
  return t.project_nearest(d.cwiseProduct(t.semi_axes()));
}

// Closed-form ellipsoid normal, independent of the implementation: ∇g / |∇g| with g = Σ (y_a/c_a)².
Vec oracle_normal(const TargetManifold& t, const Vec& y) {
  const Vec g = y.cwiseQuotient(t.semi_axes().cwiseProduct(t.semi_axes()));
  return g.normalized();
}

TEST(TargetManifold, Defaults) {
  EXPECT_DOUBLE_EQ(TargetManifold::sphere(3).tube_radius(), 0.5);
  EXPECT_DOUBLE_EQ(TargetManifold::ellipsoid(v2(2, 1)).tube_radius(), 0.25);
  EXPECT_LOJVAR_ERROR(TargetManifold::sphere(1), invalid_argument);
  EXPECT_LOJVAR_ERROR(TargetManifold::sphere(3, 1.0), invalid_argument);
  EXPECT_LOJVAR_ERROR(TargetManifold::ellipsoid(v2(2, -1)), invalid_argument);
}

TEST(TargetManifold, ProjectionExamples) {
  const auto s = TargetManifold::sphere(2, 0.9);
  EXPECT_LT((s.project_nearest(v2(0.6, 0.8) * 1.4) - v2(0.6, 0.8)).norm(), 1e-15);
  const auto e = TargetManifold::ellipsoid(v2(2, 1));
  // (3,0) and (0,3) are outside the default tube; a wider tube exercises the root solve.
  const auto wide = TargetManifold::ellipsoid(v2(2, 1), 0.99);
  EXPECT_LT((e.project_nearest(v2(2.2, 0)) - v2(2, 0)).norm(), 1e-12);
  EXPECT_LT((wide.project_nearest(v2(2.9, 0)) - v2(2, 0)).norm(), 1e-12);
  EXPECT_LT((wide.project_nearest(v2(0, 1.9)) - v2(0, 1)).norm(), 1e-12);
  EXPECT_LOJVAR_ERROR(s.project_nearest(v2(3, 4)), outside_tube);
  EXPECT_LOJVAR_ERROR(e.project_nearest(v2(3, 0)), outside_tube);
}

TEST(TargetManifold, EllipsoidProjectionIsStationary) {
  const auto e = ellipsoid3();
  Rng rng(3);
  for (int k = 0; k < 50; ++k) {
    const Vec y0 = random_on(e, rng);
    const Vec x = y0 + rng.uniform(-0.15, 0.15) * oracle_normal(e, y0) + 0.01 * rng.unit_vector(3);
    const Vec y = e.project_nearest(x);
    EXPECT_NEAR(e.level(y), 0.0, 1e-12);
    // x - y is parallel to the normal at y.
    const Vec n = oracle_normal(e, y);
    EXPECT_LT(((x - y) - (x - y).dot(n) * n).norm(), 1e-12);
  }
}

TEST(TargetManifold, SphereDifferential) {
  const auto s = TargetManifold::sphere(3);
  EXPECT_LT((s.differential_of_projection(v3(1.2, 0, 0), v3(0, 1, 0)) - v3(0, 1 / 1.2, 0)).norm(), 1e-15);
  const auto wide = TargetManifold::sphere(3, 0.99);
  EXPECT_LT((wide.differential_of_projection(v3(1.9, 0, 0), v3(0, 1, 0)) - v3(0, 1 / 1.9, 0)).norm(), 1e-15);
  EXPECT_LT(s.differential_of_projection(v3(1, 0, 0), v3(1, 0, 0)).norm(), 1e-15);
}

TEST(TargetManifold, DifferentialIsLinear) {
  Rng rng(4);
  for (const auto& t : {TargetManifold::sphere(3), ellipsoid3()}) {
    const Vec x = random_on(t, rng) * 1.05;
    const Vec v = rng.unit_vector(3);
    const Vec w = rng.unit_vector(3);
    const Vec lhs = t.differential_of_projection(x, 0.7 * v - 1.3 * w);
    const Vec rhs = 0.7 * t.differential_of_projection(x, v) - 1.3 * t.differential_of_projection(x, w);
    EXPECT_LT((lhs - rhs).norm(), 1e-8);
  }
}

TEST(TargetManifold, ClosedFormJacobianMatchesFiniteDifference) {
  const auto e = ellipsoid3();
  Rng rng(5);
  for (int k = 0; k < 30; ++k) {
    const Vec x = random_on(e, rng) + 0.1 * rng.uniform(-1, 1) * rng.unit_vector(3);
    const Mat J = e.projection_jacobian(x);
    for (int a = 0; a < 3; ++a) {
      const Vec col = e.differential_of_projection(x, Vec::Unit(3, a));
      EXPECT_LT((J.col(a) - col).norm(), 1e-7);
    }
  }
}

TEST(TargetManifold, TangentProjectors) {
  const auto s = TargetManifold::sphere(3);
  const Mat P = s.tangent_projector(v3(1, 0, 0));
  Mat expected = Mat::Identity(3, 3);
  expected(0, 0) = 0.0;
  EXPECT_LT((P - expected).norm(), 1e-15);

  const auto e = TargetManifold::ellipsoid(v2(2, 1));
  const Mat Pe = e.tangent_projector(v2(2, 0));
  EXPECT_LT((Pe - (Mat(2, 2) << 0, 0, 0, 1).finished()).norm(), 1e-14);
  EXPECT_LOJVAR_ERROR(s.tangent_projector(v3(1.1, 0, 0)), not_on_manifold);

  Rng rng(6);
  for (const auto& t : {TargetManifold::sphere(4), TargetManifold::ellipsoid((Vec(4) << 1.2, 1, 0.9, 1.4).finished())}) {
    for (int k = 0; k < 20; ++k) {
      const Mat Q = t.tangent_projector(random_on(t, rng));
      EXPECT_LT((Q * Q - Q).norm(), 1e-12);
      EXPECT_LT((Q - Q.transpose()).norm(), 1e-12);
      EXPECT_NEAR(Q.trace(), t.ambient_dim() - 1, 1e-12);
    }
  }
}

TEST(TargetManifold, SphereSecondFundamentalForm) {
  const auto s = TargetManifold::sphere(3);
  // Sign convention A = -(D_X P)Y; on the unit sphere A(X, Y) = (X·Y) y.
  EXPECT_LT((s.second_fundamental_form(v3(0, 0, 1), v3(1, 0, 0), v3(1, 0, 0)) - v3(0, 0, 1)).norm(), 1e-15);
  EXPECT_LOJVAR_ERROR(s.second_fundamental_form(v3(0, 0, 1), v3(0, 0, 1), v3(1, 0, 0)), not_tangent);
}

TEST(TargetManifold, SphereSecondFundamentalFormMatchesProjectorDifference) {
  const auto s = TargetManifold::sphere(3);
  Rng rng(7);
  for (int k = 0; k < 20; ++k) {
    const Vec y = rng.unit_vector(3);
    const Mat P = s.tangent_projector(y);
    const Vec X = P * rng.unit_vector(3);
    const Vec Y = P * rng.unit_vector(3);
    const double eps = 1e-5;
    // Curve through y with velocity X, staying on the sphere.
    const Mat dP = (s.tangent_projector((y + eps * X).normalized()) - s.tangent_projector((y - eps * X).normalized())) / (2 * eps);
    EXPECT_LT((s.second_fundamental_form(y, X, Y) + dP * Y).norm(), 1e-8);
  }
}

// For the level set of g(y) = Σ (y_a/c_a)², A(X,Y) = n (X·D Y)/|∇g| with D = diag(2/c²),
// the Hessian of g.
TEST(TargetManifold, EllipsoidSecondFundamentalForm) {
  const auto e = ellipsoid3();
  Rng rng(8);
  for (int k = 0; k < 20; ++k) {
    const Vec y = random_on(e, rng);
    const Mat P = e.tangent_projector(y);
    const Vec X = P * rng.unit_vector(3);
    const Vec Y = P * rng.unit_vector(3);
    const Vec c2 = e.semi_axes().cwiseProduct(e.semi_axes());
    const Vec grad = 2.0 * y.cwiseQuotient(c2);
    const Vec D = 2.0 * c2.cwiseInverse();
    const Vec n = grad.normalized();
    const Vec oracle = n * X.dot(D.cwiseProduct(Y)) / grad.norm();
    const Vec A = e.second_fundamental_form(y, X, Y);
    EXPECT_LT((A - oracle).norm(), 1e-7);
    EXPECT_LT((A - e.second_fundamental_form(y, Y, X)).norm(), 1e-8);
    EXPECT_LT((P * A).norm(), 1e-8);
  }
}

TEST(TargetManifoldProperty, ProjectionIdempotentAndNearest) {
  Rng rng(9);
  for (const auto& t : {TargetManifold::sphere(3), ellipsoid3()}) {
    for (int k = 0; k < 20; ++k) {
      const Vec y0 = random_on(t, rng);
      const Vec x = y0 + 0.15 * rng.uniform(-1, 1) * rng.unit_vector(3);
      const Vec y = t.project_nearest(x);
      EXPECT_LT((t.project_nearest(y) - y).norm(), 1e-12);
      const double d = (x - y).norm();
      for (int j = 0; j < 100; ++j) EXPECT_LE(d, (x - random_on(t, rng)).norm() + 1e-12);
    }
  }
}

TEST(TargetManifoldProperty, DifferentialIsIdentityOnTangentSpace) {
  Rng rng(10);
  for (const auto& t : {TargetManifold::sphere(3), ellipsoid3()}) {
    for (int k = 0; k < 20; ++k) {
      const Vec y = random_on(t, rng);
      const Vec v = t.tangent_projector(y) * rng.unit_vector(3);
      EXPECT_LT((t.differential_of_projection(y, v) - v).norm(), 1e-8);
    }
  }
}

}  // namespace
}  // namespace lojvar
