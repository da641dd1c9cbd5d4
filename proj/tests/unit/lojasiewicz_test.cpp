#include "lojvar/lojasiewicz.hpp"

#include "lojvar/rng.hpp"
#include "support.hpp"

namespace lojvar {
namespace {

SampleCloud power_cloud(double theta, double c, int count, double lo_exp = -8, double hi_exp = 0) {
  SampleCloud cloud;
  for (int k = 0; k < count; ++k) {
    const double v = std::pow(10.0, lo_exp + (hi_exp - lo_exp) * k / (count - 1));
    cloud.pairs.push_back({v, std::pow(v, theta) / c});
  }
  return cloud;
}

Polynomial poly1(int power) { return Polynomial(1, {{{power}, 1.0}}); }
Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

const std::vector<double> kRadii{1e-3, 2e-3, 5e-3, 1e-2, 2e-2, 5e-2, 1e-1};

TEST(EstimateGradientExponent, ExactPowerLaws) {
  for (double theta : {0.5, 0.75}) {
    const ExponentFit fit = estimate_gradient_exponent(power_cloud(theta, 0.3, 40));
    EXPECT_NEAR(fit.theta, theta, 1e-9);
    EXPECT_NEAR(fit.constant, 0.3, 1e-9);
    EXPECT_NEAR(fit.r_squared, 1.0, 1e-12);
    EXPECT_EQ(fit.sample_count, 40);
  }
}

TEST(EstimateGradientExponent, Preconditions) {
  EXPECT_LOJVAR_ERROR(estimate_gradient_exponent(power_cloud(0.5, 1.0, 9)), insufficient_data);
  EXPECT_LOJVAR_ERROR(estimate_gradient_exponent(power_cloud(0.5, 1.0, 30, -3, -1.5)), insufficient_data);
  EXPECT_LOJVAR_ERROR(estimate_gradient_exponent(power_cloud(1.5, 1.0, 30)), fit_out_of_range);
}

TEST(EstimateGradientExponent, FloorHitsAreExcludedAndCounted) {
  SampleCloud cloud = power_cloud(0.5, 1.0, 20);
  cloud.pairs.push_back({1e-15, 1e-3});
  cloud.pairs.push_back({1e-3, 0.0});
  const ExponentFit fit = estimate_gradient_exponent(cloud);
  EXPECT_EQ(fit.sample_count, 20);
  EXPECT_EQ(fit.noise_floor_hits, 2);
  EXPECT_NEAR(fit.theta, 0.5, 1e-9);
}

TEST(EstimateGradientExponentProperty, ScaleEquivariance) {
  Rng rng(1);
  SampleCloud cloud;
  for (int k = 0; k < 60; ++k) {
    const double v = std::pow(10.0, rng.uniform(-7, -1));
    cloud.pairs.push_back({v, std::pow(v, 0.6) * std::exp(0.2 * rng.normal())});
  }
  const ExponentFit base = estimate_gradient_exponent(cloud);
  for (double c : {1e-3, 7.0, 1e4}) {
    SampleCloud scaled = cloud;
    for (auto& p : scaled.pairs) {
      p.value_gap *= c;
      p.gradient_norm *= std::pow(c, base.theta);
    }
    EXPECT_NEAR(estimate_gradient_exponent(scaled).theta, base.theta, 1e-9);
  }
}

TEST(VerifyInequality, ExactCloudPassesHoldout) {
  const InequalityReport rep = verify_inequality(power_cloud(0.5, 0.4, 50), 0.5);
  EXPECT_EQ(rep.holdout_pass_fraction, 1.0);
  EXPECT_NEAR(rep.c_min, 0.4, 1e-12);
  EXPECT_FALSE(rep.diverging);
}

TEST(VerifyInequality, UnderclaimedExponentDiverges) {
  const SampleCloud cloud = finite_dim_cloud(poly1(4), vec({0.0}), kRadii, 8, 2);
  const InequalityReport rep = verify_inequality(cloud, 0.5);
  EXPECT_TRUE(rep.diverging);
  EXPECT_LT(rep.trend_slope, -0.05);
}

TEST(VerifyInequality, EmptyCloud) {
  SampleCloud cloud;
  cloud.pairs.push_back({0.0, 0.0});
  EXPECT_LOJVAR_ERROR(verify_inequality(cloud, 0.5), insufficient_data);
}

TEST(FiniteDimGradientExponent, ClassicalExamples) {
  const ExponentFit q = finite_dim_gradient_exponent(poly1(2), vec({0.0}), kRadii);
  EXPECT_NEAR(q.theta, 0.5, 1e-6);
  EXPECT_NEAR(q.constant, 0.5, 1e-6);
  const ExponentFit r = finite_dim_gradient_exponent(poly1(4), vec({0.0}), kRadii);
  EXPECT_NEAR(r.theta, 0.75, 1e-6);
  EXPECT_NEAR(r.constant, 0.25, 1e-6);
  const Polynomial mixed(2, {{{2, 0}, 1.0}, {{0, 4}, 1.0}});
  EXPECT_NEAR(finite_dim_gradient_exponent(mixed, vec({0.0, 0.0}), kRadii).theta, 0.75, 0.05);
}

TEST(FiniteDimGradientExponent, ShiftedCriticalPoint) {
  // (x - 1)² + 3 has its minimum at 1 with value 3.
  const Polynomial f(1, {{{2}, 1.0}, {{1}, -2.0}, {{0}, 4.0}});
  EXPECT_NEAR(finite_dim_gradient_exponent(f, vec({1.0}), kRadii).theta, 0.5, 1e-6);
  EXPECT_LOJVAR_ERROR(finite_dim_gradient_exponent(f, vec({0.5}), kRadii), invalid_argument);
}

TEST(FiniteDimDistanceExponent, ClassicalExamples) {
  const DistanceFit q = finite_dim_distance_exponent(poly1(2), vec({-1}), vec({1}), 201);
  EXPECT_NEAR(q.alpha, 2.0, 0.05);
  EXPECT_NEAR(q.constant, 1.0, 0.05);
  const Polynomial xy(2, {{{2, 2}, 1.0}});
  const DistanceFit d = finite_dim_distance_exponent(xy, vec({-1, -1}), vec({1, 1}), 41);
  EXPECT_NEAR(d.alpha, 4.0, 0.05);
  EXPECT_NEAR(d.constant, 1.0, 0.05);
  EXPECT_NEAR(finite_dim_distance_exponent(poly1(4), vec({-1}), vec({1}), 201).alpha, 4.0, 0.05);
}

TEST(FiniteDimDistanceExponent, NoZeros) {
  const Polynomial f(1, {{{0}, 1.0}, {{2}, 1.0}});
  EXPECT_LOJVAR_ERROR(finite_dim_distance_exponent(f, vec({-1}), vec({1}), 41), empty_zero_set);
}

TEST(Provenance, Names) {
  EXPECT_EQ(to_string(Provenance::flow_trajectory), "flow_trajectory");
  EXPECT_EQ(to_string(Provenance::random_perturbation), "random_perturbation");
  EXPECT_EQ(to_string(Provenance::grid), "grid");
}

class GreatCircleProbe : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    const auto mesh = DomainMesh::circle(64);
    const auto b = build_pullback_bundle(mesh, TargetManifold::sphere(3), great_circle(mesh, 3, 1));
    ws_ = new ReductionWorkspace(ReductionWorkspace::build(b, energy_functional_on_bundle(b)));
    quartic_ = new ReductionWorkspace(ReductionWorkspace::build(b, with_quartic_penalty(energy_functional_on_bundle(b), 10.0)));
  }
  static void TearDownTestSuite() {
    delete ws_;
    delete quartic_;
  }
  static ReductionWorkspace* ws_;
  static ReductionWorkspace* quartic_;
};

ReductionWorkspace* GreatCircleProbe::ws_ = nullptr;
ReductionWorkspace* GreatCircleProbe::quartic_ = nullptr;

TEST_F(GreatCircleProbe, IntegrabilityVerdicts) {
  const IntegrabilityReport yes = integrability_probe(*ws_, {0.0, 0.005, 0.01, 0.02});
  EXPECT_TRUE(yes.integrable);
  EXPECT_TRUE(yes.rows[0].pass);
  EXPECT_EQ(yes.rows[0].max_abs_f, 0.0);

  const IntegrabilityReport no = integrability_probe(*quartic_, {0.01, 0.02});
  EXPECT_FALSE(no.integrable);
  ASSERT_EQ(no.rows.size(), 2u);
  EXPECT_NEAR(std::log2(no.rows[1].max_abs_f / no.rows[0].max_abs_f), 4.0, 0.3);
}

TEST_F(GreatCircleProbe, PerturbationCloud) {
  const SampleCloud cloud = perturbation_cloud(*ws_, {0.02, 0.01}, 5, 3);
  EXPECT_EQ(cloud.provenance, Provenance::random_perturbation);
  EXPECT_EQ(cloud.pairs.size(), 10u);
  for (const auto& p : cloud.pairs) {
    EXPECT_GE(p.value_gap, 0.0);
    EXPECT_GT(p.gradient_norm, 0.0);
  }
}

}  // namespace
}  // namespace lojvar
