#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "thinshell/distributions.hpp"
#include "thinshell/stats.hpp"

namespace thinshell::moments {

// (E|Y|^p)^{1/p} / (E|Y|²)^{1/2} per p; p = 0 is exp(E log|Y|) / (E|Y|²)^{1/2}.
struct MomentCurve {
  std::vector<double> p_grid;
  std::vector<double> ratio;
  std::vector<Interval> ci;
  std::vector<double> bootstrap_sd;
  int n = 0;
  std::optional<double> n_bar;
  std::optional<double> alpha;
  std::size_t samples = 0;

  // Index of p in the grid, if present.
  std::optional<std::size_t> find(double p) const;
};

// Norms of N draws generated row by row, without storing the batch.
std::vector<double> sample_norms(const distributions::DensitySpec& spec, std::size_t N, std::uint64_t seed);

// Euclidean norms of the rows.
std::vector<double> row_norms(const distributions::RowMatrix& values);

MomentCurve moment_ratio_curve(const distributions::SampleBatch& batch, std::span<const double> p_grid,
                               std::uint64_t seed, int bootstrap_resamples = 200);
MomentCurve moment_ratio_curve(std::span<const double> norms, int n, std::span<const double> p_grid,
                               std::uint64_t seed, int bootstrap_resamples = 200);

// Largest violation of power-mean monotonicity beyond the joint bootstrap spread.
double monotonicity_violation(const MomentCurve& curve);

struct ProjectionIdentityReport {
  int n = 0;
  int k = 0;
  double p = 0.0;
  double lhs = 0.0;  // E|Y|^p
  double rhs = 0.0;  // Γ-coefficient · E E_F |P_F Y|^p
  double coefficient = 0.0;
  double joint_std_error = 0.0;
  double relative_discrepancy = 0.0;
  bool identity_holds = false;
  // Normalized-ratio inequality against the Haar-averaged projection.
  double ratio_lhs = 0.0;
  double ratio_rhs = 0.0;
  std::optional<bool> ratio_inequality_holds;
  int subspaces = 0;
};

// Row block i is projected on the i-th Haar subspace F = U(E₀).
ProjectionIdentityReport projection_moment_identity(const distributions::SampleBatch& batch, int k, double p,
                                                    int haar_count, std::uint64_t seed);

struct EntropyDecomposition {
  double lhs = 0.0;
  double mean_entropy = 0.0;
  double entropy_of_h = 0.0;
  double residual = 0.0;
};

// masses(u, j) is the mass of μ_u at t_grid[j]; f = t^p.
EntropyDecomposition entropy_decomposition_check(const Eigen::MatrixXd& masses, std::span<const double> t_grid,
                                                 double p);

// Histograms of |P_E Y| on the bins of t_edges for `count` Haar subspaces, scaled so that
// the average measure is a probability measure. Returns (masses, bin centers).
std::pair<Eigen::MatrixXd, std::vector<double>> discretized_radial_family(const distributions::SampleBatch& batch,
                                                                          int k, int count,
                                                                          std::span<const double> t_edges,
                                                                          std::uint64_t seed);

struct TailCurve {
  std::vector<double> t_grid;
  std::vector<double> upper;  // P̂(|Y| ≥ (1+t)√n)
  std::vector<double> lower;  // P̂(|Y| ≤ (1−t)√n)
  std::vector<Interval> upper_ci;
  std::vector<Interval> lower_ci;
  std::size_t samples = 0;
  int n = 0;
  double min_observed = 0.0;  // min |Y|/√n
};

TailCurve tail_curve(std::span<const double> norms, int n, std::span<const double> t_grid);
TailCurve tail_curve(const distributions::SampleBatch& batch, std::span<const double> t_grid);

struct FitReport {
  std::string form;
  double c = 0.0;
  double C = 0.0;
  double residual_sup = 0.0;
  int points = 0;
  bool residuals_one_sided = false;
  bool verdict = false;
  std::vector<double> x;
  std::vector<double> y;
};

// −log(CP upper of P(||Y| − √n| ≥ t√n)) ≥ c·n̄^{α/2}·min(t^{2+α}, t) − log C.
FitReport fit_deviation_form(const TailCurve& curve, double n_bar, double alpha);

struct ThinShellPoint {
  int n = 0;
  double mean_norm = 0.0;
  double sd_norm = 0.0;
  Interval sd_ci;
};

struct ThinShellScan {
  distributions::Family family = distributions::Family::gaussian;
  std::vector<ThinShellPoint> points;
  double fitted_C = 0.0;  // max_n √Var|X| / n^{1/3}
  LineFit log_log;
  bool verdict = false;
};

ThinShellScan thin_shell_scan(distributions::Family family, std::span<const int> n_grid, std::size_t N,
                              std::uint64_t seed, double max_C = 5.0);

// √Var of the chi distribution with n degrees of freedom.
double chi_sd(int n);

// Markov bound from the moment curve. side = +1 bounds P(|Y| ≥ (1+t)s),
// side = −1 bounds P(|Y| ≤ (1−t)s), s = (E|Y|²)^{1/2}.
double tail_from_moments(const MomentCurve& curve, double t, int side);

// Upper bound on (E Z^{−2p})^{1/2p}, Z = |Y|/√n, from the tail envelopes.
double moments_from_tail(const TailCurve& curve, double p);

struct ReductionReport {
  std::vector<double> p_grid;
  std::vector<double> lhs;
  std::vector<double> rhs;
  std::vector<double> joint_std_error;
  bool holds = false;
};

ReductionReport reduction_check(const distributions::SampleBatch& x, const distributions::LinearMap& map,
                                std::span<const double> p_grid);

struct CheegerDiagnostic {
  std::vector<int> n_grid;
  std::vector<double> mean_norm;
  std::vector<double> sd_norm;
  std::vector<double> bobkov_quantity;
  double exponent = 0.0;
  bool verdict = false;
};

CheegerDiagnostic cheeger_diagnostic(const ThinShellScan& scan);

struct GridCheck {
  double worst = 0.0;
  int evaluations = 0;
  bool holds = false;
};

// d/dp (1/p) log[Γ((p+n)/2)Γ(k/2)/(Γ(n/2)Γ((p+k)/2))] ≤ 0 for p ∈ [1, 10].
GridCheck gamma_decr_check(std::span<const int> k_grid, std::span<const int> n_grid);

// max over k, p of k · d/dp (1/p) log(Γ(k+p)/Γ(k)), p ∈ [−(k−1)/2, (k−1)/2].
GridCheck stirling_bound_check(int k_min, int k_max, double max_C = 3.0);

}  // namespace thinshell::moments
