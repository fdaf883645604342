#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "oracles.hpp"
#include "thinshell/bodies.hpp"
#include "thinshell/distributions.hpp"
#include "thinshell/harness.hpp"
#include "thinshell/moments.hpp"
#include "thinshell/radial1d.hpp"
#include "thinshell/rotations.hpp"

namespace {

namespace dist = thinshell::distributions;
namespace radial = thinshell::radial;
namespace bodies = thinshell::bodies;
namespace moments = thinshell::moments;
namespace rotations = thinshell::rotations;
namespace harness = thinshell::harness;
using dist::Family;

struct Outcome {
  bool ok = false;
  std::string detail;
};

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c);
  return buf;
}

std::vector<double> linspace(double a, double b, double step) {
  std::vector<double> out;
  const auto count = static_cast<long>(std::floor((b - a) / step + 1e-9));
  for (long i = 0; i <= count; ++i) out.push_back(a + static_cast<double>(i) * step);
  return out;
}

Eigen::VectorXd marginal_direction(const dist::DensitySpec& spec) {
  if (spec.family() == Family::uniform_simplex) return dist::simplex_vertex_direction(spec.dim(), 0);
  return Eigen::VectorXd::Unit(spec.dim(), 0);
}

// Every zoo marginal in both orientations, at n = 3.
std::vector<std::pair<std::string, radial::RadialFunction>> zoo_marginals() {
  std::vector<std::pair<std::string, radial::RadialFunction>> out;
  for (Family family : dist::all_families()) {
    const auto spec = dist::make_density(family, 3);
    const auto w = radial::marginal_1d(spec, marginal_direction(spec));
    out.emplace_back(std::string(dist::to_string(family)) + "+", w);
    out.emplace_back(std::string(dist::to_string(family)) + "-", w.reflected());
  }
  return out;
}

double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(y.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sxy += (x[i] - mx) * (y[i] - my), sxx += (x[i] - mx) * (x[i] - mx);
  return sxy / sxx;
}

Outcome gaussian_moments() {
  const int n = 64;
  const std::vector<double> p{-2.0, 1.0, 3.0, 4.0, 8.0};
  const auto norms = moments::sample_norms(dist::make_density(Family::gaussian, n), 200000, 101);
  const auto curve = moments::moment_ratio_curve(norms, n, p, 101);
  double worst = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j)
    worst = std::max(worst, std::abs(curve.ratio[j] - thinshell::oracle::gaussian_moment_ratio(n, p[j])) / curve.ci[j].width());
  return {worst <= 3.0, fmt("max deviation %.3f CI widths", worst)};
}

Outcome so1_identity() {
  const int n = 32, k = 9;
  const double p = 3.0;
  const auto batch = dist::sample(dist::make_density(Family::product_laplace, n), 1000000, 102);
  const auto r = moments::projection_moment_identity(batch, k, p, 200, 102);
  const double coefficient = std::exp(std::lgamma(0.5 * (p + n)) + std::lgamma(0.5 * k) - std::lgamma(0.5 * n) -
                                      std::lgamma(0.5 * (p + k)));
  const bool coefficient_ok = std::abs(r.coefficient - coefficient) <= 1e-12 * coefficient;
  return {r.relative_discrepancy <= 0.01 && coefficient_ok,
          fmt("lhs %.5g rhs %.5g relative %.2e", r.lhs, r.rhs, r.relative_discrepancy)};
}

Outcome entropy_decomposition() {
  const auto batch = dist::sample(dist::make_density(Family::product_laplace, 16), 20000, 103);
  const auto [masses, centers] = moments::discretized_radial_family(batch, 4, 100, linspace(0.0, 8.0, 0.05), 103);
  double worst = 0.0;
  for (double p : {1.0, 2.0, 4.0})
    worst = std::max(worst, std::abs(moments::entropy_decomposition_check(masses, centers, p).residual));
  return {masses.rows() == 100 && worst < 1e-12, fmt("instances %.0f max residual %.2e", masses.rows(), worst)};
}

Outcome grunbaum() {
  const double lo = std::exp(-1.0) - 1e-6, hi = 1.0 - std::exp(-1.0) + 1e-6;
  bool ok = true;
  double min_mass = 1.0, max_mass = 0.0;
  for (const auto& [name, w] : zoo_marginals()) {
    const double m = radial::grunbaum_mass(w).positive_mass;
    min_mass = std::min(min_mass, m);
    max_mass = std::max(max_mass, m);
    ok = ok && m >= lo && m <= hi;
  }
  const auto spec = dist::make_density(Family::product_shifted_exponential, 3);
  const double extremal = radial::grunbaum_mass(radial::marginal_1d(spec, marginal_direction(spec))).positive_mass;
  const double gap = std::abs(extremal - std::exp(-1.0));
  return {ok && gap <= 1e-6, fmt("masses in [%.6f, %.6f], extremal gap %.2e", min_mass, max_mass, gap)};
}

Outcome borell() {
  const std::vector<double> q = linspace(1.0, 12.0, 1.0);
  double worst_borell = -1.0, worst_bobkov = -1.0;
  for (const auto& [name, w] : zoo_marginals()) {
    worst_borell = std::max(worst_borell, radial::concavity_check(w, radial::ConcavityMode::borell, q, 1e-8).max_second_difference);
    worst_bobkov = std::max(worst_bobkov, radial::concavity_check(w, radial::ConcavityMode::bobkov, q, 1e-8).max_second_difference);
  }
  radial::RadialFunction exponential;
  exponential.evaluator = [](double t) { return std::exp(-t); };
  exponential.lo = 0.0;
  exponential.log_concave = true;
  double phi = 0.0;
  for (double v : radial::concavity_check(exponential, radial::ConcavityMode::borell, q, 1e-8).phi) phi = std::max(phi, std::abs(v));
  return {worst_borell <= 1e-8 && worst_bobkov <= 1e-8 && phi <= 1e-10,
          fmt("borell %.2e bobkov %.2e exponential |phi| %.2e", worst_borell, worst_bobkov, phi)};
}

Outcome kq_norm() {
  bodies::DensityEvaluator box;
  box.dim = 1;
  box.value = [](const Eigen::VectorXd& x) { return std::abs(x(0)) <= 1.0 ? 1.0 : 0.0; };
  box.breakpoints = [](const Eigen::VectorXd& o, const Eigen::VectorXd& d) {
    std::vector<double> out;
    for (double edge : {-1.0, 1.0})
      if (const double t = (edge - o(0)) / d(0); t > 0.0) out.push_back(t);
    std::sort(out.begin(), out.end());
    return out;
  };
  double worst = 0.0;
  for (double q : {1.0, 2.0, 4.0, 8.0}) {
    const auto body = bodies::kq_body(box, q);
    for (double s : {1.0, -1.0}) worst = std::max(worst, std::abs(body.radial(Eigen::VectorXd::Constant(1, s)).value - 1.0));
  }
  int violations = 0, pairs = 0;
  for (Family family : {Family::gaussian, Family::product_laplace, Family::product_shifted_exponential}) {
    const auto body = bodies::kq_body(bodies::DensityEvaluator::from_spec(dist::make_density(family, 2)), 2.0);
    const auto t = bodies::triangle_inequality_check(body, 10000, 106);
    violations += t.violations;
    pairs += t.pairs;
  }
  return {worst <= 1e-10 && violations == 0 && pairs == 30000,
          fmt("radius error %.2e, %.0f violations on %.0f pairs", worst, violations, pairs)};
}

Outcome sandwich() {
  bodies::DensityEvaluator w;
  w.dim = 1;
  w.value = [](const Eigen::VectorXd& x) { return std::exp(-std::abs(x(0))); };
  w.breakpoints = [](const Eigen::VectorXd& o, const Eigen::VectorXd& d) {
    std::vector<double> out;
    if (const double t = -o(0) / d(0); t > 0.0) out.push_back(t);
    return out;
  };
  const double q = 1.0;
  const Eigen::VectorXd e = Eigen::VectorXd::Constant(1, 1.0);
  const double cartesian = bodies::zq_plus_support(w, q, e).value;
  const double polar = bodies::zq_plus_support(bodies::kq_body(w, 1.0 + q), q, e).value;
  // 2∫t e^{−t} dt on the density side and 2∫_0^{√2} t dt on the body side.
  const double identity_error = std::max(std::abs(cartesian - 2.0), std::abs(polar - 2.0));
  double worst = 0.0;
  bool finite = true;
  for (int m : {1, 2}) {
    const auto dirs = m == 1 ? bodies::DirectionSet::axis_and_diagonals(1) : bodies::DirectionSet::planar_grid(32);
    bodies::RelationInstance inst;
    inst.density = bodies::DensityEvaluator::from_spec(dist::make_density(Family::product_shifted_exponential, m));
    for (double qq : {1.0, 2.0, 4.0}) {
      const auto r = bodies::verify_relation(bodies::RelationId::sandwich, inst, {qq, qq}, dirs);
      finite = finite && r.fitted_constant && std::isfinite(*r.fitted_constant);
      if (r.fitted_constant) worst = std::max(worst, *r.fitted_constant);
    }
  }
  return {identity_error <= 1e-8 && finite && worst <= 20.0,
          fmt("identity error %.2e, max C2/C1 %.3f", identity_error, worst)};
}

Outcome loglip() {
  const int n = 12;
  Eigen::VectorXd a(n);
  for (int i = 0; i < n; ++i) a(i) = i < n / 2 ? 2.0 : 1.0;
  a *= std::sqrt(n / a.squaredNorm());
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(n, n);
  sigma.diagonal() = (a.array().square() + 1.0) / 2.0;
  std::vector<double> log_size, log_L;
  for (int k : {2, 3, 4, 6}) {
    std::vector<int> ps{2};
    if (k != 2) ps.push_back(k);
    for (int p : ps) {
      const rotations::FrameConfig frame{n, k};
      auto h = [&](const rotations::Rotation& u) { return rotations::hkp_exact_gaussian(sigma, u, frame, p).value; };
      log_size.push_back(std::log(static_cast<double>(std::max(k, p))));
      log_L.push_back(std::log(rotations::empirical_log_lipschitz(h, frame, 64, 1e-3, 108).overall));
    }
  }
  const double exponent = ols_slope(log_size, log_L);
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(n, n);
  const rotations::FrameConfig frame{n, 2};
  auto h_iso = [&](const rotations::Rotation& u) { return rotations::hkp_exact_gaussian(identity, u, frame, 2.0).value; };
  const double iso = rotations::empirical_log_lipschitz(h_iso, frame, 16, 1e-3, 108).overall;
  return {exponent <= 1.15 && iso < 1e-6, fmt("exponent %.3f, isotropic L %.2e", exponent, iso)};
}

Outcome tail_fit(Family family, double alpha) {
  const int n = 256;
  const auto spec = dist::make_density(family, n);
  const auto profile = dist::estimate_psi_alpha(spec, alpha, linspace(2.0, 32.0, 1.0), 16, 109);
  const double n_bar = dist::effective_dim(n, dist::LinearMap::identity(n), profile);
  const auto norms = moments::sample_norms(spec, 100000, 109);
  const auto curve = moments::tail_curve(norms, n, linspace(0.0, 1.5, 0.01));
  const auto fit = moments::fit_deviation_form(curve, n_bar, alpha);
  return {fit.c > 0.0 && fit.residuals_one_sided, fmt("c %.4g over %.0f points, n_bar %.4g", fit.c, fit.points, n_bar)};
}

Outcome thin_shell() {
  const std::vector<int> grid{16, 64, 256, 1024};
  double worst_C = 0.0, gaussian_rel = 1.0;
  for (Family family : dist::all_families()) {
    const auto scan = moments::thin_shell_scan(family, grid, 20000, 110);
    for (const auto& pt : scan.points) worst_C = std::max(worst_C, pt.sd_norm / std::cbrt(static_cast<double>(pt.n)));
    if (family == Family::gaussian) {
      const auto& last = scan.points.back();
      gaussian_rel = std::abs(last.sd_norm - thinshell::oracle::chi_sd(last.n)) / thinshell::oracle::chi_sd(last.n);
    }
  }
  return {worst_C <= 5.0 && gaussian_rel <= 0.1, fmt("max C %.4f, gaussian n=1024 relative error %.4f", worst_C, gaussian_rel)};
}

Outcome moments_tails() {
  const int n = 64;
  const auto norms = moments::sample_norms(dist::make_density(Family::gaussian, n), 100000, 111);
  const std::vector<double> p{-16.0, -8.0, -4.0, -2.0, -1.0, 1.0, 3.0, 4.0, 8.0, 12.0, 16.0};
  const auto curve = moments::moment_ratio_curve(norms, n, p, 111);
  const auto tails = moments::tail_curve(norms, n, linspace(0.0, 3.0, 0.01));
  int checked_upper = 0, checked_lower = 0, skipped = 0, failures = 0;
  for (std::size_t j = 0; j < tails.t_grid.size(); ++j)
    for (int side : {1, -1}) {
      double bound = 0.0;
      try {
        bound = moments::tail_from_moments(curve, tails.t_grid[j], side);
      } catch (const std::invalid_argument&) {
        ++skipped;
        continue;
      }
      ++(side == 1 ? checked_upper : checked_lower);
      if (bound < (side == 1 ? tails.upper_ci[j].lo : tails.lower_ci[j].lo)) ++failures;
    }
  const int checked = checked_upper + checked_lower;
  const double bound = moments::moments_from_tail(tails, 2.0);
  double direct = 0.0;
  for (double r : norms) direct += std::pow(r * r / n, -2.0);
  direct = std::pow(direct / static_cast<double>(norms.size()), 0.25);
  const double truth = thinshell::oracle::chi_negative_moment(n, 2.0);
  return {failures == 0 && checked_upper > 0 && checked_lower > 0 && bound >= direct && bound <= 2.0 * truth,
          fmt("%.0f violations on %.0f admissible points (%.0f without admissible p)", failures, checked, skipped) +
              fmt("; bound %.4f direct %.4f oracle %.4f", bound, direct, truth)};
}

Outcome reduction() {
  const int n = 64;
  const std::vector<double> p{1.0, 2.0, 4.0, 8.0};
  double worst = -1e300;
  bool ok = true;
  for (Family family : {Family::gaussian, Family::product_laplace}) {
    const auto batch = dist::sample(dist::make_density(family, n), 100000, 112);
    const auto r = moments::reduction_check(batch, dist::LinearMap::identity(n), p);
    for (std::size_t j = 0; j < p.size(); ++j) {
      const double excess = (r.lhs[j] - r.rhs[j]) / r.joint_std_error[j];
      worst = std::max(worst, excess);
      ok = ok && excess <= 3.0;
    }
  }
  return {ok, fmt("max (lhs - rhs) / joint se %.3f", worst)};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "thinshell_acceptance_determinism";
  fs::remove_all(root);
  int compared = 0, differing = 0;
  for (const char* text : {"experiment = moment-curve\nseed = 5\nN = 20000\n",
                           "experiment = thin-shell\nseed = 5\nN = 2000\nn = 16, 64\n",
                           "experiment = borell-concavity\nseed = 5\n"}) {
    const auto config = harness::parse_config_text(text);
    const fs::path a = root / (config.experiment + "_a"), b = root / (config.experiment + "_b");
    harness::emit_report(harness::run_experiment(config), a);
    harness::emit_report(harness::run_experiment(config), b);
    for (const auto& entry : fs::directory_iterator(a)) {
      if (entry.path().extension() != ".csv") continue;
      ++compared;
      if (slurp(entry.path()) != slurp(b / entry.path().filename())) ++differing;
    }
  }
  fs::remove_all(root);
  return {compared > 0 && differing == 0, fmt("%.0f CSV files compared, %.0f differ", compared, differing)};
}

struct Criterion {
  int id;
  std::string name;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "gaussian moment closed form", 30.0, gaussian_moments},
      {2, "projection moment identity", 120.0, so1_identity},
      {3, "entropy decomposition", 5.0, entropy_decomposition},
      {4, "grunbaum mass bounds", 5.0, grunbaum},
      {5, "borell and bobkov concavity", 10.0, borell},
      {6, "ball body fixed point and triangle inequality", 60.0, kq_norm},
      {7, "polar identity and sandwich constant", 120.0, sandwich},
      {8, "log-lipschitz growth exponent", 180.0, loglip},
      {9, "deviation fit, product-laplace", 120.0, [] { return tail_fit(Family::product_laplace, 1.0); }},
      {9, "deviation fit, gaussian", 120.0, [] { return tail_fit(Family::gaussian, 2.0); }},
      {10, "thin-shell constant", 300.0, thin_shell},
      {11, "moments and tails consistency", 60.0, moments_tails},
      {12, "reduction inequality", 60.0, reduction},
      {13, "byte-identical reruns", 60.0, determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("error: ") + e.what()};
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool ok = outcome.ok && elapsed <= c.budget_s;
    if (!ok) ++failures;
    std::printf("%s criterion %d: %s: %s [%.1f s / %.0f s]\n", ok ? "PASS" : "FAIL", c.id, c.name.c_str(),
                outcome.detail.c_str(), elapsed, c.budget_s);
    std::fflush(stdout);
  }
  std::printf("%d of %zu checks failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
