#include <algorithm>
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "thinshell/rotations.hpp"

namespace thinshell::rotations {
namespace {

Eigen::MatrixXd plane(int n, int i, int j) {
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
  B(j, i) = 1.0;
  B(i, j) = -1.0;
  return B;
}

TEST(Haar, OrthogonalWithUnitDeterminant) {
  for (std::uint64_t i = 0; i < 20; ++i) {
    const Rotation u = haar_rotation(6, 5, i);
    EXPECT_LT(u.orthogonality_drift(), 1e-12);
    EXPECT_NEAR(u.matrix.determinant(), 1.0, 1e-12);
  }
}

TEST(Haar, PlaneAngleIsUniform) {
  const int count = 10000;
  std::vector<double> angles;
  for (int i = 0; i < count; ++i) {
    const Rotation u = haar_rotation(2, 8, static_cast<std::uint64_t>(i));
    double a = std::atan2(u.matrix(1, 0), u.matrix(0, 0));
    if (a < 0) a += 2 * std::numbers::pi;
    angles.push_back(a / (2 * std::numbers::pi));
  }
  std::sort(angles.begin(), angles.end());
  double ks = 0.0;
  for (int i = 0; i < count; ++i)
    ks = std::max({ks, std::abs((i + 1.0) / count - angles[i]), std::abs(angles[i] - static_cast<double>(i) / count)});
  EXPECT_LT(ks, 1.36 / std::sqrt(static_cast<double>(count)));
}

TEST(Haar, FirstColumnIsUniformOnSphere) {
  const int count = 100000;
  Eigen::VectorXd s1 = Eigen::VectorXd::Zero(5), s2 = Eigen::VectorXd::Zero(5);
  for (int i = 0; i < count; ++i) {
    const Eigen::VectorXd c = haar_rotation(5, 9, static_cast<std::uint64_t>(i)).matrix.col(0);
    s1 += c;
    s2 += c.cwiseProduct(c);
  }
  for (int j = 0; j < 5; ++j) {
    EXPECT_NEAR(s1(j) / count, 0.0, 4.0 / std::sqrt(5.0 * count));
    // Var(x_j²) on S⁴ is 3/35 − 1/25.
    EXPECT_NEAR(s2(j) / count, 0.2, 4.0 * std::sqrt((3.0 / 35.0 - 0.04) / count));
  }
}

TEST(Metric, PlaneGeneratorHasUnitNorm) {
  EXPECT_NEAR(movement_norm(plane(4, 0, 2)), 1.0, 1e-15);
  EXPECT_NEAR(metric(plane(4, 0, 2), plane(4, 1, 3)), 0.0, 1e-15);
}

TEST(Geodesic, FullTurnAndZeroStep) {
  const Rotation u0 = haar_rotation(4, 1, 0);
  const Eigen::MatrixXd B = plane(4, 1, 3);
  EXPECT_EQ(geodesic_step(u0, B, 0.0).matrix, u0.matrix);
  EXPECT_LT((geodesic_step(u0, B, 2 * std::numbers::pi).matrix - u0.matrix).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Geodesic, QuarterTurnMapsFirstAxisToSecond) {
  const Rotation id{Eigen::MatrixXd::Identity(3, 3)};
  const Rotation u = geodesic_step(id, plane(3, 0, 1), std::numbers::pi / 2);
  EXPECT_LT((u.matrix.col(0) - Eigen::Vector3d(0, 1, 0)).norm(), 1e-12);
}

TEST(Geodesic, GeneralGeneratorStaysOrthogonal) {
  Eigen::MatrixXd B = plane(5, 0, 1) + 0.3 * plane(5, 2, 4) - 0.7 * plane(5, 1, 3);
  const Rotation u = geodesic_step(haar_rotation(5, 2, 0), B, 1.3);
  EXPECT_LT(u.orthogonality_drift(), 1e-12);
}

TEST(Geodesic, NonAntisymmetricIsRejected) {
  const Rotation id{Eigen::MatrixXd::Identity(3, 3)};
  EXPECT_THROW(geodesic_step(id, Eigen::MatrixXd::Identity(3, 3), 1.0), std::invalid_argument);
}

TEST(MovementBasis, Counts) {
  const FrameConfig f{4, 2};
  EXPECT_EQ(movement_dimension(f, MovementType::type1), 1u);
  EXPECT_EQ(movement_dimension(f, MovementType::type2), 2u);
  EXPECT_EQ(movement_dimension(f, MovementType::type3), 2u);
  EXPECT_EQ(movement_dimension(f, MovementType::type1) + movement_dimension(f, MovementType::type2) +
                movement_dimension(f, MovementType::type3),
            5u);
  EXPECT_EQ(movement_dimension(FrameConfig{3, 2}, MovementType::type3), 1u);
  EXPECT_EQ(movement_dimension(FrameConfig{6, 3}, MovementType::general), 15u);
  for (const auto& m : movement_basis(FrameConfig{5, 3}, MovementType::type3)) EXPECT_NEAR(m.norm, 1.0, 1e-15);
}

TEST(Hkp, IsotropicClosedForm) {
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(6, 6);
  for (int k : {2, 3, 5})
    for (double p : {1.0, 2.0, 3.5}) {
      const double expected = std::exp(oracle::log_chi_moment(k, p));
      EXPECT_NEAR(hkp_exact_gaussian(id, haar_rotation(6, 3, 0), FrameConfig{6, k}, p).value, expected, 1e-10 * expected);
    }
}

TEST(Hkp, IsotropicIsRotationInvariant) {
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(5, 5);
  double lo = 1e300, hi = 0.0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const double h = hkp_exact_gaussian(id, haar_rotation(5, 4, i), FrameConfig{5, 3}, 2.5).value;
    lo = std::min(lo, h);
    hi = std::max(hi, h);
  }
  EXPECT_LT((hi - lo) / hi, 1e-12);
}

TEST(Hkp, AnisotropicAgainstQuadrature) {
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(4, 4);
  sigma(0, 0) = 4.0;
  // 2π ∫ t³ g(t e₁) dt with g the N(0, diag(4,1)) density on the first two coordinates.
  const double oracle_value = 2 * std::numbers::pi *
                              oracle::simpson([](double t) { return t * t * t * std::exp(-t * t / 8.0) / (4 * std::numbers::pi); },
                                              0.0, 60.0, 200000);
  EXPECT_NEAR(oracle_value, 16.0, 1e-8);
  const double h = hkp_exact_gaussian(sigma, Rotation{Eigen::MatrixXd::Identity(4, 4)}, FrameConfig{4, 2}, 2.0).value;
  EXPECT_NEAR(h, oracle_value, 1e-8);
}

TEST(Hkp, ConeEstimatorApproachesExact) {
  const auto spec = distributions::make_density(distributions::Family::gaussian, 4);
  const auto batch = distributions::sample(spec, 400000, 12);
  const Rotation u = haar_rotation(4, 6, 0);
  const FrameConfig frame{4, 2};
  const HkpEstimate mc = hkp_estimate_mc(batch, u, frame, 2.0, 0.2);
  const double exact = hkp_exact_gaussian(Eigen::MatrixXd::Identity(4, 4), u, frame, 2.0).value;
  EXPECT_NEAR(mc.value, exact, 5.0 * mc.std_error + 0.02 * exact);
  EXPECT_GE(mc.samples_used, 200u);
}

TEST(Hkp, EmptyConeIsAnError) {
  const auto batch = distributions::sample(distributions::make_density(distributions::Family::gaussian, 4), 1000, 1);
  EXPECT_ANY_THROW(hkp_estimate_mc(batch, haar_rotation(4, 1, 0), FrameConfig{4, 2}, 2.0, 1e-4));
}

TEST(Cap, ClosedForms) {
  EXPECT_NEAR(cap_fraction(2, 0.3), 0.3 / std::numbers::pi, 1e-14);
  EXPECT_NEAR(cap_fraction(3, 0.3), (1 - std::cos(0.3)) / 2, 1e-14);
  EXPECT_NEAR(cap_fraction(4, std::numbers::pi / 2), 0.5, 1e-14);
}

TEST(LogLipschitz, IsotropicIsConstant) {
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(6, 6);
  const FrameConfig frame{6, 2};
  const auto L = empirical_log_lipschitz([&](const Rotation& u) { return hkp_exact_gaussian(id, u, frame, 2.0).value; },
                                         frame, 8, 1e-3, 1);
  EXPECT_LT(L.overall, 1e-6);
}

TEST(LogLipschitz, AnisotropicIsRichardsonConsistent) {
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(6, 6);
  sigma.diagonal().head(3).setConstant(2.5);
  const FrameConfig frame{6, 3};
  const auto L = empirical_log_lipschitz(
      [&](const Rotation& u) { return hkp_exact_gaussian(sigma, u, frame, 2.0).value; }, frame, 8, 1e-3, 2);
  EXPECT_TRUE(L.richardson_consistent);
  EXPECT_GT(L.overall, 0.0);
  EXPECT_GE(L.overall, std::max({L.type1, L.type2, L.type3}) - 1e-12);
}

TEST(ReverseHolder, ConstantFunction) {
  const std::vector<double> h(1000, 3.0);
  const auto r = reverse_holder_check(h, 0.0, 2.0, 1.0, 10);
  EXPECT_NEAR(r.norm_q / r.norm_r, 1.0, 1e-14);
  EXPECT_EQ(r.fitted_K, 0.0);
  EXPECT_TRUE(r.finite);
}

TEST(ReverseHolder, TooFewSamples) {
  const std::vector<double> h(10, 1.0);
  EXPECT_THROW(reverse_holder_check(h, 1.0, 2.0, 1.0, 10), std::invalid_argument);
}

}  // namespace
}  // namespace thinshell::rotations
