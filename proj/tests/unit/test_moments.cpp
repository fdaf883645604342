#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "thinshell/moments.hpp"

namespace thinshell::moments {
namespace {

namespace dist = thinshell::distributions;

std::vector<double> linspace(double a, double b, double step) {
  std::vector<double> out;
  for (int i = 0; a + i * step <= b + 1e-12; ++i) out.push_back(a + i * step);
  return out;
}

TEST(MomentCurve, PointTwoIsExactlyOne) {
  const auto norms = sample_norms(dist::make_density(dist::Family::product_laplace, 16), 5000, 2);
  const std::vector<double> p{1.0, 2.0, 4.0};
  const MomentCurve curve = moment_ratio_curve(norms, 16, p, 3);
  EXPECT_DOUBLE_EQ(curve.ratio[*curve.find(2.0)], 1.0);
}

TEST(MomentCurve, GaussianMatchesClosedForm) {
  const int n = 32;
  const auto norms = sample_norms(dist::make_density(dist::Family::gaussian, n), 50000, 4);
  const std::vector<double> p{-2.0, 0.0, 1.0, 3.0, 6.0};
  const MomentCurve curve = moment_ratio_curve(norms, n, p, 5);
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (p[j] == 0.0) continue;
    EXPECT_LE(std::abs(curve.ratio[j] - oracle::gaussian_moment_ratio(n, p[j])), 3.0 * curve.ci[j].width()) << p[j];
  }
  EXPECT_LE(monotonicity_violation(curve), 0.0);
}

TEST(MomentCurve, BatchAndNormsAgree) {
  const auto spec = dist::make_density(dist::Family::uniform_cube, 8);
  const auto batch = dist::sample(spec, 4000, 6);
  const std::vector<double> p{1.0, 3.0};
  const MomentCurve a = moment_ratio_curve(batch, p, 1);
  const MomentCurve b = moment_ratio_curve(sample_norms(spec, 4000, 6), 8, p, 1);
  for (std::size_t j = 0; j < p.size(); ++j) EXPECT_NEAR(a.ratio[j], b.ratio[j], 1e-12);
}

TEST(ProjectionIdentity, GaussianAndSecondMoment) {
  const auto batch = dist::sample(dist::make_density(dist::Family::gaussian, 8), 200000, 7);
  const auto r = projection_moment_identity(batch, 5, 2.0, 50, 8);
  EXPECT_TRUE(r.identity_holds);
  EXPECT_NEAR(r.lhs, 8.0, 0.1);
  EXPECT_LT(r.relative_discrepancy, 0.01);
}

TEST(Entropy, SingleMeasureHasNoMixingTerm) {
  Eigen::MatrixXd masses(1, 4);
  masses << 0.1, 0.2, 0.3, 0.4;
  const std::vector<double> t{0.5, 1.0, 1.5, 2.0};
  const auto d = entropy_decomposition_check(masses, t, 2.0);
  EXPECT_NEAR(d.entropy_of_h, 0.0, 1e-15);
  EXPECT_LT(std::abs(d.residual), 1e-14);
}

TEST(Entropy, EqualTotalsHaveNoMixingTerm) {
  Eigen::MatrixXd masses(2, 3);
  masses << 0.2, 0.3, 0.5, 0.5, 0.3, 0.2;
  const std::vector<double> t{1.0, 2.0, 3.0};
  const auto d = entropy_decomposition_check(masses, t, 0.0);
  EXPECT_NEAR(d.entropy_of_h, 0.0, 1e-14);
  EXPECT_LT(std::abs(d.residual), 1e-14);
}

TEST(Entropy, DiscretizedLaplaceFamily) {
  const auto batch = dist::sample(dist::make_density(dist::Family::product_laplace, 16), 20000, 9);
  const auto edges = linspace(0.0, 8.0, 0.04);
  const auto [masses, centers] = discretized_radial_family(batch, 4, 100, edges, 10);
  EXPECT_EQ(masses.rows(), 100);
  EXPECT_NEAR(masses.sum() / 100.0, 1.0, 1e-12);
  EXPECT_LT(std::abs(entropy_decomposition_check(masses, centers, 3.0).residual), 1e-12);
}

TEST(Tail, ComplementAtZeroAndExtremes) {
  const auto norms = sample_norms(dist::make_density(dist::Family::gaussian, 256), 100000, 11);
  const std::vector<double> t{0.0, 0.1, 3.0};
  const TailCurve c = tail_curve(norms, 256, t);
  EXPECT_GE(c.upper[0] + c.lower[0], 0.9);
  EXPECT_LE(c.upper[0] + c.lower[0], 1.1);
  EXPECT_LE(c.upper[1], 0.05);
  EXPECT_EQ(c.upper[2], 0.0);
  EXPECT_LT(c.upper_ci[2].hi, 1e-4);
}

TEST(Fit, NoInformativePointsIsAnError) {
  TailCurve c;
  c.t_grid = {0.0, 1.0, 2.0};
  c.upper = {0.0, 0.0, 0.0};
  c.lower = {1.0, 0.0, 0.0};
  c.upper_ci = {{0.0, 1e-4}, {0.0, 1e-4}, {0.0, 1e-4}};
  c.lower_ci = {{0.9999, 1.0}, {0.0, 1e-4}, {0.0, 1e-4}};
  c.samples = 100000;
  c.n = 16;
  EXPECT_THROW(fit_deviation_form(c, 16.0, 2.0), std::invalid_argument);
}

TEST(Fit, GaussianDeviationConstantIsPositive) {
  const int n = 256;
  const auto norms = sample_norms(dist::make_density(dist::Family::gaussian, n), 100000, 12);
  const TailCurve c = tail_curve(norms, n, linspace(0.0, 1.5, 0.01));
  const FitReport fit = fit_deviation_form(c, n / 0.5, 2.0);
  EXPECT_GT(fit.c, 0.0);
  EXPECT_TRUE(fit.residuals_one_sided);
}

TEST(ThinShell, GaussianTracksChiOracle) {
  const std::vector<int> grid{16, 64, 256};
  const ThinShellScan scan = thin_shell_scan(dist::Family::gaussian, grid, 20000, 13);
  for (const auto& pt : scan.points) EXPECT_NEAR(pt.sd_norm, oracle::chi_sd(pt.n), 0.05 * oracle::chi_sd(pt.n));
  EXPECT_TRUE(scan.verdict);
  EXPECT_NEAR(scan.log_log.slope, 0.0, 0.1);
}

TEST(ThinShell, ChiStandardDeviation) {
  for (int n : {1, 4, 64, 1024}) EXPECT_NEAR(chi_sd(n), oracle::chi_sd(n), 1e-9);
}

TEST(ThinShell, LaplaceIsBoundedWellBelowLimit) {
  const std::vector<int> grid{64, 256};
  const ThinShellScan scan = thin_shell_scan(dist::Family::product_laplace, grid, 20000, 14);
  EXPECT_LE(scan.fitted_C, 1.0);
}

TEST(TailFromMoments, DominatesEmpiricalTail) {
  const int n = 64;
  const auto norms = sample_norms(dist::make_density(dist::Family::gaussian, n), 50000, 15);
  const std::vector<double> p{-8.0, -4.0, 1.0, 4.0, 8.0};
  const MomentCurve curve = moment_ratio_curve(norms, n, p, 16);
  const double bound = tail_from_moments(curve, 0.5, 1);
  EXPECT_LE(bound, std::pow(7.0 / 6.0, -8.0) + 1e-12);
  const TailCurve tails = tail_curve(norms, n, std::vector<double>{0.5});
  EXPECT_GE(bound, tails.upper_ci[0].lo);
  EXPECT_GE(tail_from_moments(curve, 0.5, -1), tails.lower_ci[0].lo);
}

TEST(TailFromMoments, MonotoneForLargeT) {
  const auto norms = sample_norms(dist::make_density(dist::Family::gaussian, 64), 20000, 17);
  const MomentCurve curve = moment_ratio_curve(norms, 64, std::vector<double>{4.0, 8.0}, 18);
  double previous = 1.0;
  for (double t : {2.0, 4.0, 8.0}) {
    const double b = tail_from_moments(curve, t, 1);
    EXPECT_NEAR(b, std::pow(std::min(1 + t / 3.0, (1 + t) / (1 + t / 2.0)), -8.0), 1e-12);
    EXPECT_LE(b, previous);
    previous = b;
  }
}

TEST(TailFromMoments, OnlySecondMomentIsAnError) {
  const auto norms = sample_norms(dist::make_density(dist::Family::gaussian, 8), 5000, 19);
  const MomentCurve curve = moment_ratio_curve(norms, 8, std::vector<double>{2.0}, 20);
  EXPECT_THROW(tail_from_moments(curve, 0.1, 1), std::invalid_argument);
}

TEST(MomentsFromTail, GaussianNegativeMoment) {
  const int n = 64;
  const auto norms = sample_norms(dist::make_density(dist::Family::gaussian, n), 100000, 21);
  const TailCurve c = tail_curve(norms, n, linspace(0.0, 3.0, 0.01));
  const double bound = moments_from_tail(c, 2.0);
  double direct = 0.0;
  for (double r : norms) direct += std::pow(r * r / n, -2.0);
  direct = std::pow(direct / norms.size(), 0.25);
  const double truth = oracle::chi_negative_moment(n, 2.0);
  EXPECT_NEAR(truth, 1.0244, 1e-4);
  EXPECT_GE(bound, direct);
  EXPECT_LE(bound, 2.0 * truth);
}

TEST(MomentsFromTail, PointMass) {
  TailCurve c;
  c.t_grid = {0.0, 0.5, 1.0, 2.0};
  c.upper = {1.0, 0.0, 0.0, 0.0};
  c.lower = {1.0, 0.0, 0.0, 0.0};
  c.upper_ci = {{1.0, 1.0}, {0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}};
  c.lower_ci = {{1.0, 1.0}, {0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}};
  c.samples = 1000;
  c.n = 4;
  c.min_observed = 1.0;
  EXPECT_NEAR(moments_from_tail(c, 3.0), 1.0, 1e-15);
}

TEST(MomentsFromTail, BeyondResolutionIsAnError) {
  const auto norms = sample_norms(dist::make_density(dist::Family::gaussian, 1), 5000, 22);
  const TailCurve c = tail_curve(norms, 1, linspace(0.0, 4.0, 0.05));
  EXPECT_THROW(moments_from_tail(c, 2.0), std::domain_error);
}

TEST(Reduction, GaussianSecondMoment) {
  const int n = 32;
  const auto x = dist::sample(dist::make_density(dist::Family::gaussian, n), 50000, 23);
  const auto r = reduction_check(x, dist::LinearMap::identity(n), std::vector<double>{1.0, 2.0});
  EXPECT_NEAR(r.lhs[1], 1.0, 0.01);
  EXPECT_NEAR(r.rhs[1], std::exp(0.5 * oracle::log_chi_moment(n, 4.0)) / n, 0.01);
  EXPECT_TRUE(r.holds);
}

TEST(Cheeger, GaussianExponentNearQuarter) {
  const std::vector<int> grid{16, 64, 256, 1024};
  const auto d = cheeger_diagnostic(thin_shell_scan(dist::Family::gaussian, grid, 20000, 24));
  EXPECT_NEAR(d.exponent, -0.25, 0.05);
  EXPECT_TRUE(d.verdict);
}

TEST(GridChecks, GammaRatioAndStirling) {
  const std::vector<int> k{2, 3, 5, 10, 40}, n{10, 40, 100};
  EXPECT_TRUE(gamma_decr_check(k, n).holds);
  const GridCheck s = stirling_bound_check(5, 100);
  EXPECT_TRUE(s.holds);
  EXPECT_LE(s.worst, 3.0);
}

}  // namespace
}  // namespace thinshell::moments
