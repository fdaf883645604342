#include "thinshell/moments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "thinshell/parallel.hpp"
#include "thinshell/rng.hpp"
#include "thinshell/rotations.hpp"
#include "thinshell/special.hpp"

namespace thinshell::moments {
namespace {

constexpr double kConfidence = 0.99;
constexpr std::size_t kRowBlock = 4096;

struct LogStat {
  double value = 0.0;
  double std_error = 0.0;
};

// (1/pa)·log mean(a) − (1/pb)·log mean(b) with a delta-method standard error.
LogStat log_power_ratio(std::span<const double> a, double pa, std::span<const double> b, double pb) {
  const auto N = static_cast<double>(a.size());
  const double ma = mean(a);
  const double mb = mean(b);
  double vaa = 0.0, vbb = 0.0, vab = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    vaa += da * da;
    vbb += db * db;
    vab += da * db;
  }
  vaa /= N - 1.0;
  vbb /= N - 1.0;
  vab /= N - 1.0;
  const double ga = 1.0 / (pa * ma);
  const double gb = -1.0 / (pb * mb);
  const double var = (ga * ga * vaa + gb * gb * vbb + 2.0 * ga * gb * vab) / N;
  return {std::log(ma) / pa - std::log(mb) / pb, std::sqrt(std::max(0.0, var))};
}

std::vector<double> powers(std::span<const double> z, double p) {
  std::vector<double> out(z.size());
  std::transform(z.begin(), z.end(), out.begin(), [p](double v) { return std::pow(v, p); });
  return out;
}

// log of (mean of exp(s·l_i))^{1/s}, or mean l_i when s = 0.
double log_power_mean(std::span<const double> logs, double s) {
  if (s == 0.0) return mean(logs);
  std::vector<double> scaled(logs.size());
  std::transform(logs.begin(), logs.end(), scaled.begin(), [s](double l) { return s * l; });
  return (logsumexp(scaled) - std::log(static_cast<double>(logs.size()))) / s;
}

std::size_t count_at_least(const std::vector<double>& sorted, double level) {
  return static_cast<std::size_t>(sorted.end() - std::lower_bound(sorted.begin(), sorted.end(), level));
}

std::size_t count_at_most(const std::vector<double>& sorted, double level) {
  return static_cast<std::size_t>(std::upper_bound(sorted.begin(), sorted.end(), level) - sorted.begin());
}

}  // namespace

std::optional<std::size_t> MomentCurve::find(double p) const {
  for (std::size_t i = 0; i < p_grid.size(); ++i)
    if (p_grid[i] == p) return i;
  return std::nullopt;
}

std::vector<double> sample_norms(const distributions::DensitySpec& spec, std::size_t N, std::uint64_t seed) {
  std::vector<double> norms(N);
  const int n = spec.dim();
  for_each_block(N, kRowBlock, [&](std::size_t, std::size_t begin, std::size_t end) {
    std::vector<double> row(static_cast<std::size_t>(n));
    for (std::size_t i = begin; i < end; ++i) {
      spec.sample_row(seed, i, row);
      double s = 0.0;
      for (double v : row) s += v * v;
      norms[i] = std::sqrt(s);
    }
  });
  return norms;
}

std::vector<double> row_norms(const distributions::RowMatrix& values) {
  std::vector<double> out(static_cast<std::size_t>(values.rows()));
  for (Eigen::Index i = 0; i < values.rows(); ++i) out[static_cast<std::size_t>(i)] = values.row(i).norm();
  return out;
}

MomentCurve moment_ratio_curve(const distributions::SampleBatch& batch, std::span<const double> p_grid,
                               std::uint64_t seed, int bootstrap_resamples) {
  const std::vector<double> norms = row_norms(batch.values);
  return moment_ratio_curve(norms, batch.dim(), p_grid, seed, bootstrap_resamples);
}

MomentCurve moment_ratio_curve(std::span<const double> norms, int n, std::span<const double> p_grid,
                               std::uint64_t seed, int bootstrap_resamples) {
  if (norms.empty()) throw std::invalid_argument("moment_ratio_curve: empty sample");
  if (p_grid.empty()) throw std::invalid_argument("moment_ratio_curve: empty p grid");
  if (bootstrap_resamples < 2) throw std::invalid_argument("moment_ratio_curve: need at least 2 resamples");
  const bool nonpositive_p = std::any_of(p_grid.begin(), p_grid.end(), [](double p) { return p <= 0.0; });
  for (double p : p_grid)
    if (!(p > -n + 1)) throw std::invalid_argument("moment_ratio_curve: p must exceed -n+1");
  const std::size_t N = norms.size();
  std::vector<double> logs(N);
  for (std::size_t i = 0; i < N; ++i) {
    if (norms[i] == 0.0 && nonpositive_p) throw std::domain_error("moment_ratio_curve: zero norm with p ≤ 0");
    logs[i] = std::log(norms[i]);
  }

  MomentCurve curve;
  curve.n = n;
  curve.samples = N;
  curve.p_grid.assign(p_grid.begin(), p_grid.end());
  const double log_second = log_power_mean(logs, 2.0);
  for (double p : p_grid) curve.ratio.push_back(std::exp(log_power_mean(logs, p) - log_second));

  // Per-p shifts keep every exp(p·l − shift) ≤ 1.
  const double lmax = *std::max_element(logs.begin(), logs.end());
  const double lmin = *std::min_element(logs.begin(), logs.end());
  std::vector<double> exponents(p_grid.begin(), p_grid.end());
  exponents.push_back(2.0);
  std::vector<double> shifts(exponents.size());
  for (std::size_t j = 0; j < exponents.size(); ++j) shifts[j] = exponents[j] >= 0.0 ? exponents[j] * lmax : exponents[j] * lmin;

  const auto B = static_cast<std::size_t>(bootstrap_resamples);
  std::vector<std::vector<double>> replicates(B);
  for_each_block(B, 1, [&](std::size_t b, std::size_t, std::size_t) {
    CounterRng rng(seed, Stream::bootstrap, b);
    std::vector<double> sums(exponents.size(), 0.0);
    for (std::size_t draw = 0; draw < N; ++draw) {
      const auto i = std::min(N - 1, static_cast<std::size_t>(rng.uniform() * static_cast<double>(N)));
      const double l = logs[i];
      for (std::size_t j = 0; j < exponents.size(); ++j)
        sums[j] += exponents[j] == 0.0 ? l : std::exp(exponents[j] * l - shifts[j]);
    }
    const double logN = std::log(static_cast<double>(N));
    auto log_mean_power = [&](std::size_t j) {
      return exponents[j] == 0.0 ? sums[j] / static_cast<double>(N)
                                 : (std::log(sums[j]) - logN + shifts[j]) / exponents[j];
    };
    const double second = log_mean_power(exponents.size() - 1);
    std::vector<double> ratios(p_grid.size());
    for (std::size_t j = 0; j < p_grid.size(); ++j) ratios[j] = std::exp(log_mean_power(j) - second);
    replicates[b] = std::move(ratios);
  });
  for (std::size_t j = 0; j < p_grid.size(); ++j) {
    std::vector<double> column(B);
    for (std::size_t b = 0; b < B; ++b) column[b] = replicates[b][j];
    const double alpha = 1.0 - kConfidence;
    curve.ci.push_back({quantile(column, alpha / 2), quantile(column, 1.0 - alpha / 2)});
    curve.bootstrap_sd.push_back(std::sqrt(variance(column)));
  }
  return curve;
}

double monotonicity_violation(const MomentCurve& curve) {
  std::vector<std::size_t> order(curve.p_grid.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return curve.p_grid[a] < curve.p_grid[b]; });
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < order.size(); ++i) {
    const std::size_t a = order[i], b = order[i + 1];
    const double slack = 3.0 * std::hypot(curve.bootstrap_sd[a], curve.bootstrap_sd[b]);
    worst = std::max(worst, curve.ratio[a] - curve.ratio[b] - slack);
  }
  return worst;
}

ProjectionIdentityReport projection_moment_identity(const distributions::SampleBatch& batch, int k, double p,
                                                    int haar_count, std::uint64_t seed) {
  const int n = batch.dim();
  if (k < 2 || k > n) throw std::invalid_argument("projection_moment_identity: need 2 ≤ k ≤ n");
  if (p == 0.0 || std::abs(p) > 0.5 * (k - 1))
    throw std::invalid_argument("projection_moment_identity: need 0 < |p| ≤ (k-1)/2");
  if (haar_count < 1 || haar_count > batch.size())
    throw std::invalid_argument("projection_moment_identity: haar_count must lie in [1, N]");
  const auto N = static_cast<std::size_t>(batch.size());
  const auto H = static_cast<std::size_t>(haar_count);
  std::vector<double> full(N), projected(N);
  for_each_block(H, 1, [&](std::size_t j, std::size_t, std::size_t) {
    const std::size_t begin = j * N / H;
    const std::size_t end = (j + 1) * N / H;
    const rotations::Rotation u = rotations::haar_rotation(n, seed, j);
    const auto rows = static_cast<Eigen::Index>(end - begin);
    const auto block = batch.values.middleRows(static_cast<Eigen::Index>(begin), rows);
    const Eigen::MatrixXd proj = block * u.matrix.leftCols(k);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (Eigen::Index i = 0; i < rows; ++i) {
      full[begin + static_cast<std::size_t>(i)] = block.row(i).norm() * scale;
      projected[begin + static_cast<std::size_t>(i)] = proj.row(i).norm() * scale;
    }
  });
  if (p < 0.0 && std::any_of(projected.begin(), projected.end(), [](double v) { return v == 0.0; }))
    throw std::domain_error("projection_moment_identity: zero projection with negative p");

  ProjectionIdentityReport report;
  report.n = n;
  report.k = k;
  report.p = p;
  report.subspaces = haar_count;
  report.coefficient = std::exp(log_gamma(0.5 * (p + n)) + log_gamma(0.5 * k) - log_gamma(0.5 * n) -
                                log_gamma(0.5 * (p + k)));
  // Moments of |Y|/√n; the identity is homogeneous in the scale.
  const std::vector<double> a = powers(full, p);
  const std::vector<double> c = powers(projected, p);
  std::vector<double> d(N);
  for (std::size_t i = 0; i < N; ++i) d[i] = a[i] - report.coefficient * c[i];
  const double rescale = std::pow(static_cast<double>(n), 0.5 * p);
  report.lhs = mean(a) * rescale;
  report.rhs = report.coefficient * mean(c) * rescale;
  report.joint_std_error = std::sqrt(variance(d) / static_cast<double>(N)) * rescale;
  report.relative_discrepancy = std::abs(report.lhs - report.rhs) / report.lhs;
  report.identity_holds = std::abs(report.lhs - report.rhs) <= 3.0 * report.joint_std_error;
  if (p >= 2.0) {
    const LogStat left = log_power_ratio(a, p, powers(full, 2.0), 2.0);
    const LogStat right = log_power_ratio(c, p, powers(projected, 2.0), 2.0);
    report.ratio_lhs = std::exp(left.value);
    report.ratio_rhs = std::exp(right.value);
    report.ratio_inequality_holds = left.value <= right.value + 3.0 * std::hypot(left.std_error, right.std_error);
  }
  return report;
}

EntropyDecomposition entropy_decomposition_check(const Eigen::MatrixXd& masses, std::span<const double> t_grid,
                                                 double p) {
  if (masses.cols() != static_cast<Eigen::Index>(t_grid.size()))
    throw std::invalid_argument("entropy_decomposition_check: grid size mismatch");
  if (masses.rows() == 0) throw std::invalid_argument("entropy_decomposition_check: empty family");
  if ((masses.array() < 0.0).any()) throw std::invalid_argument("entropy_decomposition_check: negative mass");
  if (!(masses.sum() > 0.0)) throw std::domain_error("entropy_decomposition_check: zero total mass");
  const auto T = t_grid.size();
  std::vector<long double> f(T), flogf(T);
  for (std::size_t j = 0; j < T; ++j) {
    if (!(t_grid[j] > 0.0)) throw std::invalid_argument("entropy_decomposition_check: grid must be positive");
    f[j] = std::pow(static_cast<long double>(t_grid[j]), static_cast<long double>(p));
    flogf[j] = f[j] * static_cast<long double>(p) * std::log(static_cast<long double>(t_grid[j]));
  }
  auto xlogx = [](long double x) { return x > 0.0L ? x * std::log(x) : 0.0L; };
  const auto U = static_cast<long double>(masses.rows());
  long double mean_h = 0.0L, mean_ent = 0.0L, mean_hlogh = 0.0L;
  std::vector<long double> mixture(T, 0.0L);
  for (Eigen::Index u = 0; u < masses.rows(); ++u) {
    long double h = 0.0L, e = 0.0L;
    for (std::size_t j = 0; j < T; ++j) {
      const long double m = masses(u, static_cast<Eigen::Index>(j));
      h += m * f[j];
      e += m * flogf[j];
      mixture[j] += m;
    }
    mean_h += h;
    mean_ent += e - xlogx(h);
    mean_hlogh += xlogx(h);
  }
  mean_h /= U;
  mean_ent /= U;
  mean_hlogh /= U;
  long double mix_flogf = 0.0L;
  for (std::size_t j = 0; j < T; ++j) mix_flogf += mixture[j] / U * flogf[j];
  EntropyDecomposition out;
  out.lhs = static_cast<double>(mix_flogf - xlogx(mean_h));
  out.mean_entropy = static_cast<double>(mean_ent);
  out.entropy_of_h = static_cast<double>(mean_hlogh - xlogx(mean_h));
  out.residual = static_cast<double>(std::abs((mix_flogf - xlogx(mean_h)) - mean_ent - (mean_hlogh - xlogx(mean_h))));
  return out;
}

std::pair<Eigen::MatrixXd, std::vector<double>> discretized_radial_family(const distributions::SampleBatch& batch,
                                                                          int k, int count,
                                                                          std::span<const double> t_edges,
                                                                          std::uint64_t seed) {
  const int n = batch.dim();
  if (k < 2 || k > n) throw std::invalid_argument("discretized_radial_family: need 2 ≤ k ≤ n");
  if (t_edges.size() < 2 || !std::is_sorted(t_edges.begin(), t_edges.end()))
    throw std::invalid_argument("discretized_radial_family: edges must be sorted, at least 2");
  const auto bins = static_cast<Eigen::Index>(t_edges.size() - 1);
  Eigen::MatrixXd masses = Eigen::MatrixXd::Zero(count, bins);
  for_each_block(static_cast<std::size_t>(count), 1, [&](std::size_t u, std::size_t, std::size_t) {
    const rotations::Rotation rot = rotations::haar_rotation(n, seed, u);
    const Eigen::MatrixXd proj = batch.values * rot.matrix.leftCols(k);
    for (Eigen::Index i = 0; i < proj.rows(); ++i) {
      const double r = proj.row(i).norm();
      const auto it = std::upper_bound(t_edges.begin(), t_edges.end(), r);
      if (it == t_edges.begin() || it == t_edges.end()) continue;
      masses(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(it - t_edges.begin()) - 1) += 1.0;
    }
  });
  const double total = masses.sum() / count;
  if (!(total > 0.0)) throw std::domain_error("discretized_radial_family: no samples inside the grid");
  masses /= total;
  std::vector<double> centers(static_cast<std::size_t>(bins));
  for (std::size_t j = 0; j < centers.size(); ++j) centers[j] = 0.5 * (t_edges[j] + t_edges[j + 1]);
  return {std::move(masses), std::move(centers)};
}

TailCurve tail_curve(std::span<const double> norms, int n, std::span<const double> t_grid) {
  if (norms.empty()) throw std::invalid_argument("tail_curve: empty sample");
  std::vector<double> z(norms.begin(), norms.end());
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (double& v : z) v *= scale;
  std::sort(z.begin(), z.end());
  TailCurve curve;
  curve.n = n;
  curve.samples = z.size();
  curve.min_observed = z.front();
  curve.t_grid.assign(t_grid.begin(), t_grid.end());
  const auto N = static_cast<double>(z.size());
  for (double t : t_grid) {
    if (t < 0.0) throw std::invalid_argument("tail_curve: t must be non-negative");
    const std::size_t up = count_at_least(z, 1.0 + t);
    const std::size_t lo = t <= 1.0 ? count_at_most(z, 1.0 - t) : 0;
    curve.upper.push_back(static_cast<double>(up) / N);
    curve.lower.push_back(static_cast<double>(lo) / N);
    curve.upper_ci.push_back(clopper_pearson(up, z.size(), kConfidence));
    curve.lower_ci.push_back(clopper_pearson(lo, z.size(), kConfidence));
  }
  return curve;
}

TailCurve tail_curve(const distributions::SampleBatch& batch, std::span<const double> t_grid) {
  const std::vector<double> norms = row_norms(batch.values);
  return tail_curve(norms, batch.dim(), t_grid);
}

FitReport fit_deviation_form(const TailCurve& curve, double n_bar, double alpha) {
  const auto N = curve.samples;
  const double Nd = static_cast<double>(N);
  FitReport report;
  report.form = "C exp(-c nbar^(alpha/2) min(t^(2+alpha), t))";
  for (std::size_t j = 0; j < curve.t_grid.size(); ++j) {
    const double t = curve.t_grid[j];
    const double p_hat = curve.upper[j] + curve.lower[j];
    if (!(t > 0.0) || p_hat < 10.0 / Nd || p_hat > 1.0 - 10.0 / Nd) continue;
    const auto hits = static_cast<std::uint64_t>(std::llround(p_hat * Nd));
    const double upper = clopper_pearson(hits, N, kConfidence).hi;
    report.x.push_back(std::pow(n_bar, alpha / 2.0) * std::min(std::pow(t, 2.0 + alpha), t));
    report.y.push_back(-std::log(upper));
  }
  report.points = static_cast<int>(report.x.size());
  if (report.points == 0) throw std::invalid_argument("fit_deviation_form: no informative points");
  if (report.points < 5) throw std::invalid_argument("fit_deviation_form: fewer than 5 informative points");
  const LineFit fit = fit_line(report.x, report.y);
  report.c = fit.slope;
  double log_C = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < report.points; ++j) log_C = std::max(log_C, report.c * report.x[j] - report.y[j]);
  report.C = std::exp(log_C);
  report.residual_sup = 0.0;
  bool one_sided = true;
  for (int j = 0; j < report.points; ++j) {
    const double r = report.y[j] - (report.c * report.x[j] - log_C);
    report.residual_sup = std::max(report.residual_sup, r);
    if (r < -1e-12) one_sided = false;
  }
  report.residuals_one_sided = one_sided;
  report.verdict = report.c > 0.0 && one_sided;
  return report;
}

double chi_sd(int n) {
  const double ratio = std::exp(log_gamma(0.5 * (n + 1)) - log_gamma(0.5 * n));
  return std::sqrt(n - 2.0 * ratio * ratio);
}

ThinShellScan thin_shell_scan(distributions::Family family, std::span<const int> n_grid, std::size_t N,
                              std::uint64_t seed, double max_C) {
  if (n_grid.empty()) throw std::invalid_argument("thin_shell_scan: empty n grid");
  if (N < 3) throw std::invalid_argument("thin_shell_scan: need at least 3 samples");
  ThinShellScan scan;
  scan.family = family;
  std::vector<double> log_n, log_sd;
  for (int n : n_grid) {
    const distributions::DensitySpec spec = distributions::make_density(family, n);
    const std::vector<double> norms = sample_norms(spec, N, seed);
    const double m = mean(norms);
    const double Nd = static_cast<double>(N);
    double s2 = 0.0;
    for (double r : norms) s2 += (r - m) * (r - m);
    const double sd = std::sqrt(s2 / (Nd - 1.0));
    // Delete-one jackknife for the standard deviation.
    double jack_mean = 0.0;
    std::vector<double> jack(N);
    for (std::size_t i = 0; i < N; ++i) {
      const double d = norms[i] - m;
      const double var = (s2 - d * d - d * d / (Nd - 1.0)) / (Nd - 2.0);
      jack[i] = std::sqrt(std::max(0.0, var));
      jack_mean += jack[i];
    }
    jack_mean /= Nd;
    double jack_ss = 0.0;
    for (double v : jack) jack_ss += (v - jack_mean) * (v - jack_mean);
    const double se = std::sqrt((Nd - 1.0) / Nd * jack_ss);
    scan.points.push_back({n, m, sd, {sd - 2.576 * se, sd + 2.576 * se}});
    scan.fitted_C = std::max(scan.fitted_C, sd / std::cbrt(static_cast<double>(n)));
    log_n.push_back(std::log(static_cast<double>(n)));
    log_sd.push_back(std::log(sd));
  }
  if (n_grid.size() >= 2) scan.log_log = fit_line(log_n, log_sd);
  scan.verdict = scan.fitted_C <= max_C;
  return scan;
}

double tail_from_moments(const MomentCurve& curve, double t, int side) {
  if (!(t >= 0.0)) throw std::invalid_argument("tail_from_moments: t must be non-negative");
  if (side != 1 && side != -1) throw std::invalid_argument("tail_from_moments: side must be +1 or -1");
  if (side == -1 && t >= 1.0) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < curve.p_grid.size(); ++j) {
    const double p = curve.p_grid[j];
    if (p == 2.0) continue;
    if (side == 1 && p > 0.0 && curve.ci[j].hi <= 1.0 + t / 2.0) {
      const double base = std::min(1.0 + t / 3.0, (1.0 + t) / (1.0 + t / 2.0));
      best = std::min(best, std::pow(base, -p));
    } else if (side == -1 && p < 0.0 && curve.ci[j].lo >= 1.0 - t / 2.0) {
      best = std::min(best, std::pow(1.0 - t / 2.0, -p));
    }
  }
  if (!std::isfinite(best)) throw std::invalid_argument("tail_from_moments: no admissible p in the curve");
  return std::min(1.0, best);
}

double moments_from_tail(const TailCurve& curve, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("moments_from_tail: p must be at least 1");
  const auto& t = curve.t_grid;
  if (t.empty() || t.front() != 0.0 || !std::is_sorted(t.begin(), t.end()))
    throw std::invalid_argument("moments_from_tail: t grid must be sorted and start at 0");
  if (t.back() < 1.0 - curve.min_observed)
    throw std::invalid_argument("moments_from_tail: lower tail does not reach the smallest observation");
  auto weight = [p](double a, double b) { return std::pow(a, -p) - std::pow(b, -p); };
  // p∫₀¹ F(u) u^{-(p+1)} du with F(z²) ≤ CP-upper of P(Z ≤ 1 − t_j) on z ∈ (1 − t_{j+1}, 1 − t_j].
  double lower_part = 0.0;
  double lowest_cell = 0.0;
  for (std::size_t j = 0; j < t.size() && t[j] < 1.0; ++j) {
    const double z_hi = 1.0 - t[j];
    const double z_lo = std::max({j + 1 < t.size() ? 1.0 - t[j + 1] : 0.0, 0.0, curve.min_observed});
    if (z_lo >= z_hi) continue;
    const double contribution = curve.lower_ci[j].hi * weight(z_lo * z_lo, z_hi * z_hi);
    lower_part += contribution;
    if (z_lo == curve.min_observed) lowest_cell = contribution;
  }
  // p∫₁^∞ S(u) u^{-(p+1)} du with S(z²) ≥ CP-lower of P(Z ≥ 1 + t_{j+1}) on z ∈ [1 + t_j, 1 + t_{j+1}).
  double upper_part = 0.0;
  for (std::size_t j = 0; j + 1 < t.size(); ++j) {
    const double a = (1.0 + t[j]) * (1.0 + t[j]);
    const double b = (1.0 + t[j + 1]) * (1.0 + t[j + 1]);
    upper_part += curve.upper_ci[j + 1].lo * weight(a, b);
  }
  const double total = lower_part + 1.0 - upper_part;
  if (lowest_cell > 0.1 * total)
    throw std::domain_error("moments_from_tail: p beyond the resolution of the lower tail");
  return std::pow(total, 1.0 / (2.0 * p));
}

ReductionReport reduction_check(const distributions::SampleBatch& x, const distributions::LinearMap& map,
                                std::span<const double> p_grid) {
  const int n = x.dim();
  if (map.dim() != n) throw std::invalid_argument("reduction_check: map dimension mismatch");
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  const distributions::RowMatrix ax = x.values * map.matrix().transpose();
  std::vector<double> z_ax = row_norms(ax);
  const distributions::SampleBatch y = distributions::convolve_gaussian(x, map);
  std::vector<double> z_y = row_norms(y.values);
  for (double& v : z_ax) v *= scale;
  for (double& v : z_y) v *= scale;
  const std::vector<double> ax2 = powers(z_ax, 2.0);
  const std::vector<double> y2 = powers(z_y, 2.0);
  ReductionReport report;
  report.holds = true;
  for (double p : p_grid) {
    if (!(p >= 1.0)) throw std::invalid_argument("reduction_check: p must be at least 1");
    const LogStat left = log_power_ratio(powers(z_ax, p), p, ax2, 2.0);
    const LogStat right = log_power_ratio(powers(z_y, 2.0 * p), 2.0 * p, y2, 2.0);
    const double lhs = std::exp(left.value);
    const double rhs = std::exp(2.0 * right.value);
    const double se = std::hypot(lhs * left.std_error, rhs * 2.0 * right.std_error);
    report.p_grid.push_back(p);
    report.lhs.push_back(lhs);
    report.rhs.push_back(rhs);
    report.joint_std_error.push_back(se);
    if (lhs > rhs + 3.0 * se) report.holds = false;
  }
  return report;
}

CheegerDiagnostic cheeger_diagnostic(const ThinShellScan& scan) {
  CheegerDiagnostic out;
  std::vector<double> log_n, log_q;
  bool positive = true;
  for (const auto& pt : scan.points) {
    const double q = 1.0 / std::sqrt(pt.mean_norm * pt.sd_norm);
    out.n_grid.push_back(pt.n);
    out.mean_norm.push_back(pt.mean_norm);
    out.sd_norm.push_back(pt.sd_norm);
    out.bobkov_quantity.push_back(q);
    positive = positive && q > 0.0 && std::isfinite(q);
    log_n.push_back(std::log(static_cast<double>(pt.n)));
    log_q.push_back(std::log(q));
  }
  if (out.n_grid.size() < 2) throw std::invalid_argument("cheeger_diagnostic: need at least two dimensions");
  out.exponent = fit_line(log_n, log_q).slope;
  out.verdict = positive && out.exponent >= -5.0 / 12.0 - 0.1;
  return out;
}

GridCheck gamma_decr_check(std::span<const int> k_grid, std::span<const int> n_grid) {
  GridCheck out;
  out.worst = -std::numeric_limits<double>::infinity();
  constexpr double step = 0.05;
  for (int n : n_grid)
    for (int k : k_grid) {
      if (k < 2 || k > n) continue;
      auto g = [&](double p) {
        return (log_gamma(0.5 * (p + n)) + log_gamma(0.5 * k) - log_gamma(0.5 * n) - log_gamma(0.5 * (p + k))) / p;
      };
      double previous = g(1.0);
      for (int i = 1; i <= 180; ++i) {
        const double current = g(1.0 + step * i);
        out.worst = std::max(out.worst, (current - previous) / step);
        previous = current;
        ++out.evaluations;
      }
    }
  if (out.evaluations == 0) throw std::invalid_argument("gamma_decr_check: no admissible (k, n) pair");
  out.holds = out.worst <= 1e-9;
  return out;
}

GridCheck stirling_bound_check(int k_min, int k_max, double max_C) {
  if (k_min < 2 || k_max < k_min) throw std::invalid_argument("stirling_bound_check: need 2 ≤ k_min ≤ k_max");
  GridCheck out;
  out.worst = -std::numeric_limits<double>::infinity();
  constexpr double h = 1e-5;
  for (int k = k_min; k <= k_max; ++k) {
    auto f = [k](double p) { return (log_gamma(k + p) - log_gamma(k)) / p; };
    const double half = 0.5 * (k - 1);
    for (double p = -half; p <= half + 1e-12; p += 0.05) {
      if (std::abs(p) < 0.05) continue;
      out.worst = std::max(out.worst, k * (f(p + h) - f(p - h)) / (2.0 * h));
      ++out.evaluations;
    }
  }
  out.holds = out.worst <= max_C;
  return out;
}

}  // namespace thinshell::moments
