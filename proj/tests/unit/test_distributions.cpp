#include <cmath>
#include <filesystem>
#include <numbers>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "thinshell/distributions.hpp"

namespace thinshell::distributions {
namespace {

TEST(Family, NamesRoundTrip) {
  for (Family f : all_families()) EXPECT_EQ(family_from_string(to_string(f)), f);
  EXPECT_THROW(family_from_string("cauchy"), std::invalid_argument);
}

TEST(DensitySpec, GaussianIsSymmetricWithExactProfile) {
  const DensitySpec spec = make_density(Family::gaussian, 4);
  EXPECT_TRUE(spec.symmetric());
  ASSERT_TRUE(spec.exact_psi_profile().has_value());
  EXPECT_EQ(spec.exact_psi_profile()->provenance, PsiAlphaProfile::Provenance::exact);
}

TEST(DensitySpec, ShiftedExponentialIsCenteredAndUnitVariance) {
  const DensitySpec spec = make_density(Family::product_shifted_exponential, 1);
  auto density = [&](double t) { return std::exp(spec.log_density(Eigen::VectorXd::Constant(1, t))); };
  EXPECT_NEAR(density(0.0), std::exp(-1.0), 1e-14);
  EXPECT_EQ(density(-1.5), 0.0);
  EXPECT_NEAR(oracle::simpson(density, -1.0, 60.0, 200000), 1.0, 1e-9);
  EXPECT_NEAR(oracle::simpson([&](double t) { return t * density(t); }, -1.0, 60.0, 200000), 0.0, 1e-9);
  EXPECT_NEAR(oracle::simpson([&](double t) { return t * t * density(t); }, -1.0, 60.0, 200000), 1.0, 1e-9);
}

TEST(DensitySpec, UniformCubeHasSideRootThree) {
  const DensitySpec spec = make_density(Family::uniform_cube, 2);
  const double a = std::sqrt(3.0);
  EXPECT_NEAR(std::exp(spec.log_density(Eigen::Vector2d(a - 1e-9, -a + 1e-9))), 1.0 / (4 * a * a), 1e-12);
  EXPECT_EQ(std::exp(spec.log_density(Eigen::Vector2d(a + 1e-9, 0.0))), 0.0);
}

TEST(DensitySpec, KeyValueRoundTrip) {
  for (Family f : all_families()) {
    const DensitySpec spec = make_density(f, 3);
    const DensitySpec back = DensitySpec::from_key_value(spec.to_key_value());
    EXPECT_EQ(back.family(), f);
    EXPECT_EQ(back.dim(), 3);
    EXPECT_EQ(back.descriptor(), spec.descriptor());
  }
}

TEST(Sample, GaussianCovarianceIsIdentity) {
  const SampleBatch batch = sample(make_density(Family::gaussian, 2), 100000, 7);
  const Eigen::MatrixXd cov = empirical_covariance(batch);
  EXPECT_LT((cov - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff(), 0.02);
}

TEST(Sample, SimplexIsCentered) {
  const SampleBatch batch = sample(make_density(Family::uniform_simplex, 3), 100000, 1);
  EXPECT_LT(empirical_mean(batch).cwiseAbs().maxCoeff(), 0.02);
}

TEST(Sample, LaplaceFourthMoment) {
  const SampleBatch batch = sample(make_density(Family::product_laplace, 1), 1000000, 3);
  const double m4 = batch.values.col(0).array().pow(4).mean();
  EXPECT_NEAR(m4 / 6.0, 1.0, 0.01);
}

TEST(Sample, EveryFamilyIsIsotropic) {
  for (Family f : all_families()) {
    const SampleBatch batch = sample(make_density(f, 5), 200000, 11);
    EXPECT_LT(empirical_mean(batch).cwiseAbs().maxCoeff(), 0.02) << to_string(f);
    EXPECT_LT((empirical_covariance(batch) - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff(), 0.03) << to_string(f);
  }
}

TEST(Sample, RowsDoNotDependOnBatchSize) {
  const DensitySpec spec = make_density(Family::uniform_ball, 4);
  const SampleBatch small = sample(spec, 10, 5);
  const SampleBatch large = sample(spec, 1000, 5);
  EXPECT_EQ(small.values, large.values.topRows(10));
}

TEST(Isotropize, RecoversInverseScaling) {
  SampleBatch batch = sample(make_density(Family::gaussian, 2), 200000, 9);
  batch.values.col(0) *= 2.0;
  const SampleBatch white = isotropize(batch);
  ASSERT_TRUE(white.transform.has_value());
  const Eigen::Matrix2d expected(Eigen::Vector2d(0.5, 1.0).asDiagonal());
  EXPECT_LT((white.transform->matrix() - expected).cwiseAbs().maxCoeff(), 5.0 * std::sqrt(2.0 / 200000));
}

TEST(Isotropize, SingularCovarianceIsRejected) {
  SampleBatch batch = sample(make_density(Family::gaussian, 2), 1000, 9);
  batch.values.col(1).setZero();
  EXPECT_THROW(isotropize(batch), std::domain_error);
}

TEST(ConvolveGaussian, LaplaceVarianceBookkeeping) {
  const SampleBatch x = sample(make_density(Family::product_laplace, 64), 100000, 13);
  const SampleBatch y = convolve_gaussian(x, LinearMap::identity(64));
  EXPECT_NEAR(y.values.rowwise().squaredNorm().mean() / 64.0, 1.0, 0.02);
}

TEST(ConvolveGaussian, AnisotropicMapKeepsTrace) {
  Eigen::VectorXd a(8);
  a << 2, 2, 2, 2, 1, 1, 1, 1;
  a *= std::sqrt(8.0 / a.squaredNorm());
  const LinearMap map(a.asDiagonal().toDenseMatrix());
  const SampleBatch y = convolve_gaussian(sample(make_density(Family::gaussian, 8), 100000, 2), map);
  const double second = y.values.rowwise().squaredNorm().mean();
  EXPECT_NEAR(second, 8.0, 5.0 * std::sqrt(2.0 * 8.0 * 4.0 / 100000));
}

TEST(PsiAlpha, GaussianAttainsAtTwo) {
  std::vector<double> grid;
  for (int p = 2; p <= 32; ++p) grid.push_back(p);
  const PsiAlphaProfile profile = estimate_psi_alpha(make_density(Family::gaussian, 4), 2.0, grid, 8, 1);
  double best = 0.0;
  for (double p : grid) best = std::max(best, std::exp(oracle::log_chi_moment(1, p) / p) / std::sqrt(p));
  EXPECT_NEAR(profile.b_alpha, best, 1e-10);
  EXPECT_NEAR(profile.b_alpha, std::numbers::sqrt2 / 2.0, 1e-10);
}

TEST(PsiAlpha, LaplaceAgainstQuadratureOracle) {
  std::vector<double> grid;
  for (int p = 2; p <= 32; ++p) grid.push_back(p);
  const PsiAlphaProfile profile = estimate_psi_alpha(make_density(Family::product_laplace, 4), 1.0, grid, 8, 1);
  double best = 0.0;
  for (double p : grid) best = std::max(best, std::pow(oracle::laplace_abs_moment(p), 1.0 / p) / p);
  EXPECT_NEAR(profile.b_alpha, best, 1e-6 * best);
  EXPECT_GE(profile.b_alpha, 0.5);
}

TEST(EffectiveDim, DirectFormula) {
  PsiAlphaProfile unit{2.0, 1.0, PsiAlphaProfile::Provenance::exact};
  EXPECT_NEAR(effective_dim(100, LinearMap::identity(100), unit), 100.0, 1e-9);
  PsiAlphaProfile two{2.0, 2.0, PsiAlphaProfile::Provenance::exact};
  EXPECT_NEAR(effective_dim(100, LinearMap::identity(100), two), 25.0, 1e-9);
  Eigen::VectorXd a = Eigen::VectorXd::Ones(100);
  a.head(50).setConstant(std::sqrt(2.0));
  a *= std::sqrt(100.0 / a.squaredNorm());
  const LinearMap map(a.asDiagonal().toDenseMatrix());
  EXPECT_NEAR(effective_dim(100, map, unit), 100.0 * 100.0 / (100.0 * map.op_norm() * map.op_norm()), 1e-9);
}

TEST(Persistence, BatchRoundTrip) {
  const SampleBatch batch = sample(make_density(Family::uniform_simplex, 3), 257, 21);
  const auto path = std::filesystem::temp_directory_path() / "thinshell_batch_roundtrip.bin";
  save_batch(batch, path);
  const SampleBatch back = load_batch(path);
  std::filesystem::remove(path);
  EXPECT_EQ(back.values, batch.values);
  EXPECT_EQ(back.seed, batch.seed);
}

TEST(Simplex, VertexDirectionIsUnit) {
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(simplex_vertex_direction(3, i).norm(), 1.0, 1e-14);
}

}  // namespace
}  // namespace thinshell::distributions
