#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "thinshell/bodies.hpp"
#include "thinshell/distributions.hpp"
#include "thinshell/harness.hpp"
#include "thinshell/moments.hpp"
#include "thinshell/radial1d.hpp"
#include "thinshell/rotations.hpp"
#include "thinshell/special.hpp"

namespace thinshell::harness {
namespace {

using distributions::Family;
using Params = std::vector<std::pair<std::string, Scalar>>;

Scalar num(double v) { return v; }
Scalar integer(long long v) { return static_cast<std::int64_t>(v); }
Scalar text(std::string_view v) { return std::string(v); }

Verdict hard(bool ok) { return ok ? Verdict::pass : Verdict::fail; }

ReportRecord make_record(std::string claim, Verdict verdict, Params parameters, Params metrics) {
  ReportRecord r;
  r.claim = std::move(claim);
  r.verdict = verdict;
  r.parameters = std::move(parameters);
  r.metrics = std::move(metrics);
  return r;
}

std::vector<Family> families_of(const ExperimentConfig& config, std::vector<Family> fallback) {
  if (config.family.empty()) return fallback;
  if (config.family == "zoo") return distributions::all_families();
  std::vector<Family> out;
  std::stringstream ss(config.family);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(' '));
    item.erase(item.find_last_not_of(' ') + 1);
    if (!item.empty()) out.push_back(distributions::family_from_string(item));
  }
  if (out.empty()) throw ConfigError("validation: 'family' must name at least one family");
  return out;
}

std::vector<double> grid_or(const std::vector<double>& grid, std::vector<double> fallback) {
  return grid.empty() ? fallback : grid;
}

std::vector<int> ints_or(const std::vector<int>& grid, std::vector<int> fallback) {
  return grid.empty() ? fallback : grid;
}

std::vector<double> linspace(double a, double b, double step) {
  std::vector<double> out;
  const auto count = static_cast<long>(std::floor((b - a) / step + 1e-9));
  for (long i = 0; i <= count; ++i) out.push_back(a + static_cast<double>(i) * step);
  return out;
}

// Σ = (AAᵀ + Id)/2 with A diagonal, entries 2 then 1, scaled to ‖A‖²_HS = n.
Eigen::MatrixXd anisotropic_sigma(int n) {
  Eigen::VectorXd a(n);
  for (int i = 0; i < n; ++i) a(i) = i < n / 2 ? 2.0 : 1.0;
  a *= std::sqrt(n / a.squaredNorm());
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(n, n);
  sigma.diagonal() = (a.array().square() + 1.0) / 2.0;
  return sigma;
}

Eigen::MatrixXd anisotropic_map(int n) {
  Eigen::VectorXd a(n);
  for (int i = 0; i < n; ++i) a(i) = i < n / 2 ? 2.0 : 1.0;
  a *= std::sqrt(n / a.squaredNorm());
  return a.asDiagonal();
}

// A direction along which the exact marginal is available.
Eigen::VectorXd marginal_direction(const distributions::DensitySpec& spec) {
  if (spec.family() == Family::uniform_simplex && spec.dim() > 1) return distributions::simplex_vertex_direction(spec.dim(), 0);
  return Eigen::VectorXd::Unit(spec.dim(), 0);
}

bodies::DirectionSet directions_for(int m, const ExperimentConfig& config, int fallback_planar) {
  if (m == 1) return bodies::DirectionSet::axis_and_diagonals(1);
  if (m == 2) return bodies::DirectionSet::planar_grid(config.get_int("directions", fallback_planar));
  return bodies::default_directions(m, config.seed);
}

bodies::RelationInstance density_instance(Family family, int m) {
  bodies::RelationInstance inst;
  const auto spec = distributions::make_density(family, m);
  inst.descriptor = spec.descriptor();
  inst.density = bodies::DensityEvaluator::from_spec(spec);
  return inst;
}

Params relation_metrics(const bodies::InclusionReport& r) {
  Params m{{"c1", num(r.c1)}, {"c1_radius", num(r.c1_radius)}, {"c2", num(r.c2)}, {"c2_radius", num(r.c2_radius)},
           {"directions", integer(static_cast<long long>(r.direction_count))}};
  if (r.fitted_constant) m.emplace_back(r.fitted_label.empty() ? "fitted" : r.fitted_label, num(*r.fitted_constant));
  if (r.secondary_constant) m.emplace_back(r.secondary_label.empty() ? "secondary" : r.secondary_label, num(*r.secondary_constant));
  if (!r.constant_free_claim.empty()) m.emplace_back("claim", text(r.constant_free_claim));
  return m;
}

// Hard verdict when the relation makes a constant-free claim, otherwise report-only.
ReportRecord relation_record(bodies::RelationId id, const bodies::RelationInstance& inst,
                             const bodies::RelationParams& params, const bodies::DirectionSet& dirs) {
  Params p{{"relation", text(bodies::to_string(id))}, {"instance", text(inst.descriptor)}, {"q1", num(params.q1)},
           {"q2", num(params.q2)}};
  try {
    const bodies::InclusionReport r = bodies::verify_relation(id, inst, params, dirs);
    const Verdict v = r.constant_free_holds ? hard(*r.constant_free_holds) : Verdict::report_only;
    return make_record(std::string(bodies::to_string(id)), v, std::move(p), relation_metrics(r));
  } catch (const bodies::UnsupportedRelation& e) {
    return make_record(std::string(bodies::to_string(id)), Verdict::report_only, std::move(p),
                       {{"unsupported", text(e.what())}});
  }
}

double oracle_gaussian_ratio(int n, double p) {
  const double log_second = 0.5 * log_gaussian_norm_moment(n, 2.0);
  if (p == 0.0) {
    // E log|G_n| = (log 2 + ψ(n/2))/2.
    const double h = 1e-6;
    const double digamma = (log_gamma(0.5 * n + h) - log_gamma(0.5 * n - h)) / (2.0 * h);
    return std::exp(0.5 * (std::numbers::ln2 + digamma) - log_second);
  }
  return std::exp(log_gaussian_norm_moment(n, p) / p - log_second);
}

// ---- moments ----

ExperimentResult tail_fit(const ExperimentConfig& config) {
  ExperimentResult result;
  const int n = config.n_or(256);
  const std::size_t N = config.samples(100000);
  const std::vector<double> t_grid = grid_or(config.t_grid, linspace(0.0, 1.5, 0.01));
  Table table{"tail_curve",
              {"family", "n", "n_bar", "alpha", "t", "upper", "lower", "upper_cp_lo", "upper_cp_hi", "lower_cp_lo",
               "lower_cp_hi"},
              {}};
  for (Family family : families_of(config, {Family::product_laplace, Family::gaussian})) {
    const auto spec = distributions::make_density(family, n);
    const double alpha = config.get_double("alpha", spec.default_alpha());
    const std::vector<double> psi_grid = linspace(2.0, 32.0, 1.0);
    const auto profile = distributions::estimate_psi_alpha(spec, alpha, psi_grid, 16, config.seed);
    const double n_bar = distributions::effective_dim(n, distributions::LinearMap::identity(n), profile);
    const std::vector<double> norms = moments::sample_norms(spec, N, config.seed);
    const moments::TailCurve curve = moments::tail_curve(norms, n, t_grid);
    for (std::size_t j = 0; j < curve.t_grid.size(); ++j)
      table.rows.push_back({text(distributions::to_string(family)), integer(n), num(n_bar), num(alpha),
                            num(curve.t_grid[j]), num(curve.upper[j]), num(curve.lower[j]), num(curve.upper_ci[j].lo),
                            num(curve.upper_ci[j].hi), num(curve.lower_ci[j].lo), num(curve.lower_ci[j].hi)});
    Params params{{"family", text(distributions::to_string(family))}, {"n", integer(n)},
                  {"N", integer(static_cast<long long>(N))}, {"alpha", num(alpha)}};
    try {
      const moments::FitReport fit = moments::fit_deviation_form(curve, n_bar, alpha);
      result.records.push_back(make_record(
          "deviation-form fit", Verdict::report_only, std::move(params),
          {{"c", num(fit.c)}, {"C", num(fit.C)}, {"n_bar", num(n_bar)}, {"b_alpha", num(profile.b_alpha)},
           {"points", integer(fit.points)}, {"residual_sup", num(fit.residual_sup)},
           {"c_positive", fit.c > 0.0}, {"residuals_one_sided", fit.residuals_one_sided}}));
    } catch (const std::invalid_argument& e) {
      result.records.push_back(
          make_record("deviation-form fit", Verdict::report_only, std::move(params), {{"error", text(e.what())}}));
    }
  }
  result.tables.push_back(std::move(table));
  return result;
}

ExperimentResult moment_curve(const ExperimentConfig& config) {
  ExperimentResult result;
  const int n = config.n_or(64);
  const std::size_t N = config.samples(200000);
  const std::vector<double> p_grid = grid_or(config.p_grid, {-2.0, 1.0, 3.0, 4.0, 8.0});
  Table table{"moment_curve", {"family", "n", "p", "ratio", "ci_lo", "ci_hi", "oracle"}, {}};
  for (Family family : families_of(config, {Family::gaussian})) {
    const auto spec = distributions::make_density(family, n);
    const std::vector<double> norms = moments::sample_norms(spec, N, config.seed);
    const moments::MomentCurve curve = moments::moment_ratio_curve(norms, n, p_grid, config.seed);
    const std::string name(distributions::to_string(family));
    double worst = 0.0;
    for (std::size_t j = 0; j < curve.p_grid.size(); ++j) {
      const double oracle = family == Family::gaussian ? oracle_gaussian_ratio(n, curve.p_grid[j]) : std::nan("");
      table.rows.push_back({text(name), integer(n), num(curve.p_grid[j]), num(curve.ratio[j]), num(curve.ci[j].lo),
                            num(curve.ci[j].hi), num(oracle)});
      if (family == Family::gaussian && curve.ci[j].width() > 0.0)
        worst = std::max(worst, std::abs(curve.ratio[j] - oracle) / curve.ci[j].width());
    }
    Params params{{"family", text(name)}, {"n", integer(n)}, {"N", integer(static_cast<long long>(N))}};
    if (family == Family::gaussian)
      result.records.push_back(make_record("gaussian closed-form moments", hard(worst <= 3.0), params,
                                           {{"max_deviation_in_ci_widths", num(worst)}}));
    const double violation = moments::monotonicity_violation(curve);
    result.records.push_back(
        make_record("power-mean monotonicity", hard(violation <= 0.0), params, {{"violation", num(violation)}}));
  }
  result.tables.push_back(std::move(table));
  return result;
}

ExperimentResult so1_identity(const ExperimentConfig& config) {
  ExperimentResult result;
  const int n = config.n_or(32);
  const int k = config.k_list.empty() ? 9 : config.k_list.front();
  const double p = config.p_grid.empty() ? 3.0 : config.p_grid.front();
  const std::size_t N = config.samples(1000000);
  const int subspaces = config.get_int("subspaces", 200);
  for (Family family : families_of(config, {Family::product_laplace})) {
    const auto spec = distributions::make_density(family, n);
    const auto batch = distributions::sample(spec, static_cast<Eigen::Index>(N), config.seed);
    const auto r = moments::projection_moment_identity(batch, k, p, subspaces, config.seed);
    Params params{{"family", text(distributions::to_string(family))}, {"n", integer(n)}, {"k", integer(k)},
                  {"p", num(p)}, {"N", integer(static_cast<long long>(N))}, {"subspaces", integer(subspaces)}};
    result.records.push_back(make_record(
        "projection moment identity", hard(r.identity_holds), params,
        {{"lhs", num(r.lhs)}, {"rhs", num(r.rhs)}, {"joint_std_error", num(r.joint_std_error)},
         {"relative_discrepancy", num(r.relative_discrepancy)}}));
    if (r.ratio_inequality_holds)
      result.records.push_back(make_record("haar-averaged ratio inequality", hard(*r.ratio_inequality_holds), params,
                                           {{"ratio_lhs", num(r.ratio_lhs)}, {"ratio_rhs", num(r.ratio_rhs)}}));
  }
  return result;
}

ExperimentResult entropy_decomp(const ExperimentConfig& config) {
  ExperimentResult result;
  const int n = config.n_or(32);
  const int k = config.k_list.empty() ? 4 : config.k_list.front();
  const std::size_t N = config.samples(20000);
  const int count = config.get_int("subspaces", 100);
  const int points = config.get_int("grid_points", 200);
  const double tol = config.tolerance("entropy_residual", 1e-12);
  const std::vector<double> p_grid = grid_or(config.p_grid, {1.0, 2.0, 4.0});
  for (Family family : families_of(config, {Family::product_laplace})) {
    const auto spec = distributions::make_density(family, n);
    const auto batch = distributions::sample(spec, static_cast<Eigen::Index>(N), config.seed);
    const double t_max = 4.0 * std::sqrt(static_cast<double>(k));
    const std::vector<double> edges = linspace(0.0, t_max, t_max / points);
    const auto [masses, centers] = moments::discretized_radial_family(batch, k, count, edges, config.seed);
    for (double p : p_grid) {
      const auto d = moments::entropy_decomposition_check(masses, centers, p);
      result.records.push_back(make_record(
          "entropy decomposition", hard(d.residual < tol),
          {{"family", text(distributions::to_string(family))}, {"n", integer(n)}, {"k", integer(k)}, {"p", num(p)},
           {"measures", integer(count)}, {"grid_points", integer(points)}},
          {{"lhs", num(d.lhs)}, {"mean_entropy", num(d.mean_entropy)}, {"entropy_of_h", num(d.entropy_of_h)},
           {"residual", num(d.residual)}}));
    }
  }
  return result;
}

ExperimentResult reduction(const ExperimentConfig& config) {
  ExperimentResult result;
  const int n = config.n_or(64);
  const std::size_t N = config.samples(100000);
  const std::vector<double> p_grid = grid_or(config.p_grid, {1.0, 2.0, 4.0, 8.0});
  for (Family family : families_of(config, {Family::gaussian, Family::product_laplace})) {
    const auto spec = distributions::make_density(family, n);
    const auto batch = distributions::sample(spec, static_cast<Eigen::Index>(N), config.seed);
    const auto r = moments::reduction_check(batch, distributions::LinearMap::identity(n), p_grid);
    for (std::size_t j = 0; j < r.p_grid.size(); ++j) {
      const bool ok = r.lhs[j] <= r.rhs[j] + 3.0 * r.joint_std_error[j];
      result.records.push_back(make_record(
          "reduction inequality", hard(ok),
          {{"family", text(distributions::to_string(family))}, {"n", integer(n)}, {"p", num(r.p_grid[j])}},
          {{"lhs", num(r.lhs[j])}, {"rhs", num(r.rhs[j])}, {"joint_std_error", num(r.joint_std_error[j])}}));
    }
  }
  return result;
}

std::vector<moments::ThinShellScan> scans_for(const ExperimentConfig& config) {
  const std::vector<int> n_grid = ints_or(config.n_grid, {16, 64, 256, 1024});
  const std::size_t N = config.samples(20000);
  std::vector<moments::ThinShellScan> out;
  for (Family family : families_of(config, distributions::all_families()))
    out.push_back(moments::thin_shell_scan(family, n_grid, N, config.seed, config.tolerance("thin_shell_C", 5.0)));
  return out;
}

ExperimentResult thin_shell(const ExperimentConfig& config) {
  ExperimentResult result;
  Table table{"thin_shell", {"family", "n", "mean_norm", "sd_norm", "sd_ci_lo", "sd_ci_hi"}, {}};
  for (const auto& scan : scans_for(config)) {
    const std::string name(distributions::to_string(scan.family));
    for (const auto& pt : scan.points)
      table.rows.push_back({text(name), integer(pt.n), num(pt.mean_norm), num(pt.sd_norm), num(pt.sd_ci.lo), num(pt.sd_ci.hi)});
    result.records.push_back(make_record("thin-shell fitted constant", Verdict::report_only, {{"family", text(name)}},
                                         {{"fitted_C", num(scan.fitted_C)}, {"within_limit", scan.verdict},
                                          {"log_log_slope", num(scan.log_log.slope)}}));
    if (scan.family == Family::gaussian) {
      const auto& last = scan.points.back();
      const double oracle = moments::chi_sd(last.n);
      const double rel = std::abs(last.sd_norm - oracle) / oracle;
      result.records.push_back(make_record("gaussian chi oracle", hard(rel <= 0.1),
                                           {{"family", text(name)}, {"n", integer(last.n)}},
                                           {{"sd_norm", num(last.sd_norm)}, {"oracle", num(oracle)}, {"relative_error", num(rel)}}));
    }
  }
  result.tables.push_back(std::move(table));
  return result;
}

ExperimentResult cheeger(const ExperimentConfig& config) {
  ExperimentResult result;
  for (const auto& scan : scans_for(config)) {
    const auto d = moments::cheeger_diagnostic(scan);
    Params metrics{{"exponent", num(d.exponent)}};
    for (std::size_t i = 0; i < d.n_grid.size(); ++i)
      metrics.emplace_back("bobkov_quantity_n" + std::to_string(d.n_grid[i]), num(d.bobkov_quantity[i]));
    result.records.push_back(make_record("cheeger exponent floor", hard(d.verdict),
                                         {{"family", text(distributions::to_string(scan.family))}}, std::move(metrics)));
  }
  return result;
}

ExperimentResult moments_tails(const ExperimentConfig& config) {
  ExperimentResult result;
  const int n = config.n_or(64);
  const std::size_t N = config.samples(100000);
  const std::vector<double> p_grid = grid_or(config.p_grid, {-16.0, -8.0, -4.0, -2.0, -1.0, 1.0, 3.0, 4.0, 8.0, 12.0, 16.0});
  const std::vector<double> t_grid = grid_or(config.t_grid, linspace(0.0, 3.0, 0.01));
  for (Family family : families_of(config, {Family::gaussian})) {
    const auto spec = distributions::make_density(family, n);
    const std::string name(distributions::to_string(family));
    const std::vector<double> norms = moments::sample_norms(spec, N, config.seed);
    const auto curve = moments::moment_ratio_curve(norms, n, p_grid, config.seed);
    const auto tails = moments::tail_curve(norms, n, t_grid);
    int checked = 0;
    bool dominates = true;
    for (std::size_t j = 0; j < tails.t_grid.size(); ++j) {
      for (int side : {1, -1}) {
        double bound = 0.0;
        try {
          bound = moments::tail_from_moments(curve, tails.t_grid[j], side);
        } catch (const std::invalid_argument&) {
          continue;
        }
        ++checked;
        const double empirical = side == 1 ? tails.upper_ci[j].lo : tails.lower_ci[j].lo;
        if (bound < empirical) dominates = false;
      }
    }
    result.records.push_back(make_record("markov tails dominate", hard(dominates && checked > 0),
                                         {{"family", text(name)}, {"n", integer(n)}}, {{"points_checked", integer(checked)}}));
    std::vector<double> logs(norms.size());
    for (std::size_t i = 0; i < norms.size(); ++i) logs[i] = std::log(norms[i] / std::sqrt(static_cast<double>(n)));
    for (double p : {1.0, 2.0}) {
      Params params{{"family", text(name)}, {"n", integer(n)}, {"p", num(p)}};
      try {
        const double bound = moments::moments_from_tail(tails, p);
        std::vector<double> scaled(logs.size());
        std::transform(logs.begin(), logs.end(), scaled.begin(), [p](double l) { return -2.0 * p * l; });
        const double direct =
            std::exp((logsumexp(scaled) - std::log(static_cast<double>(scaled.size()))) / (2.0 * p));
        bool ok = bound >= direct;
        Params metrics{{"bound", num(bound)}, {"direct", num(direct)}};
        if (family == Family::gaussian) {
          const double oracle = std::exp((p * std::log(n / 2.0) + log_gamma(0.5 * n - p) - log_gamma(0.5 * n)) / (2.0 * p));
          metrics.emplace_back("oracle", num(oracle));
          ok = ok && bound <= 2.0 * oracle;
        }
        result.records.push_back(make_record("negative moments from tails", hard(ok), params, std::move(metrics)));
      } catch (const std::domain_error& e) {
        result.records.push_back(make_record("negative moments from tails", Verdict::report_only, params,
                                             {{"error", text(e.what())}}));
      }
    }
  }
  return result;
}

ExperimentResult gamma_decr(const ExperimentConfig& config) {
  const std::vector<int> n_grid = ints_or(config.n_grid, {4, 8, 16, 32, 64, 128, 256});
  std::vector<int> k_grid = config.k_list;
  if (k_grid.empty())
    for (int k = 2; k <= n_grid.back(); ++k) k_grid.push_back(k);
  const auto c = moments::gamma_decr_check(k_grid, n_grid);
  ExperimentResult result;
  result.records.push_back(make_record("gamma ratio decreasing", hard(c.holds), {{"p_range", text("[1,10]")}},
                                       {{"max_derivative", num(c.worst)}, {"evaluations", integer(c.evaluations)}}));
  return result;
}

ExperimentResult stirling_bound(const ExperimentConfig& config) {
  const int k_min = config.get_int("k_min", 5);
  const int k_max = config.get_int("k_max", 100);
  const auto c = moments::stirling_bound_check(k_min, k_max, config.tolerance("stirling_C", 3.0));
  ExperimentResult result;
  result.records.push_back(make_record("stirling derivative bound", hard(c.holds),
                                       {{"k_min", integer(k_min)}, {"k_max", integer(k_max)}},
                                       {{"fitted_C", num(c.worst)}, {"evaluations", integer(c.evaluations)}}));
  return result;
}

// ---- radial ----

ExperimentResult grunbaum(const ExperimentConfig& config) {
  ExperimentResult result;
  const int n = config.n_or(3);
  for (Family family : families_of(config, distributions::all_families())) {
    const auto spec = distributions::make_density(family, n);
    for (double sign : {1.0, -1.0}) {
      const Eigen::VectorXd theta = sign * marginal_direction(spec);
      const auto w = radial::marginal_1d(spec, theta);
      const auto g = radial::grunbaum_mass(w);
      Params metrics{{"positive_mass", num(g.positive_mass)}, {"barycenter", num(g.barycenter)}, {"error", num(g.error)}};
      bool ok = g.positive_mass >= std::exp(-1.0) - 1e-6 && g.positive_mass <= 1.0 - std::exp(-1.0) + 1e-6;
      if (family == Family::product_shifted_exponential && sign > 0.0) {
        metrics.emplace_back("extremal_gap", num(std::abs(g.positive_mass - std::exp(-1.0))));
        ok = ok && std::abs(g.positive_mass - std::exp(-1.0)) <= 1e-6;
      }
      result.records.push_back(make_record("grunbaum mass bounds", hard(ok),
                                           {{"family", text(distributions::to_string(family))}, {"n", integer(n)},
                                            {"direction_sign", num(sign)}},
                                           std::move(metrics)));
    }
  }
  return result;
}

ExperimentResult borell(const ExperimentConfig& config) {
  ExperimentResult result;
  const int n = config.n_or(3);
  const std::vector<double> q_grid = grid_or(config.p_grid, linspace(1.0, 12.0, 1.0));
  const double tol = config.tolerance("concavity", 1e-8);
  for (Family family : families_of(config, distributions::all_families())) {
    const auto spec = distributions::make_density(family, n);
    const auto marginal = radial::marginal_1d(spec, marginal_direction(spec));
    for (int side : {1, -1}) {
      const auto w = side == 1 ? marginal : marginal.reflected();
      for (auto mode : {radial::ConcavityMode::borell, radial::ConcavityMode::bobkov}) {
        const auto r = radial::concavity_check(w, mode, q_grid, tol);
        bool ok = r.holds;
        Params metrics{{"max_second_difference", num(r.max_second_difference)}};
        if (family == Family::product_shifted_exponential && side == 1 && mode == radial::ConcavityMode::borell) {
          double worst = 0.0;
          for (double d : r.second_differences) worst = std::max(worst, std::abs(d));
          metrics.emplace_back("equality_case_max_abs", num(worst));
          ok = ok && worst <= 1e-10;
        }
        result.records.push_back(make_record(
            mode == radial::ConcavityMode::borell ? "borell concavity" : "bobkov concavity", hard(ok),
            {{"family", text(distributions::to_string(family))}, {"n", integer(n)}, {"side", integer(side)}},
            std::move(metrics)));
      }
    }
  }
  return result;
}

// ---- rotations ----

ExperimentResult loglip_scan(const ExperimentConfig& config) {
  ExperimentResult result;
  const int n = config.n_or(12);
  const std::vector<int> k_list = ints_or(config.k_list, {2, 3, 4, 6});
  const int probes = config.get_int("probes", 64);
  const double delta = config.get_double("delta", 1e-3);
  const Eigen::MatrixXd sigma = anisotropic_sigma(n);
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(n, n);
  Table table{"loglip", {"n", "k", "p", "type", "delta", "L", "oracle"}, {}};
  std::vector<double> log_size, log_L;
  for (int k : k_list) {
    std::vector<int> ps{2};
    if (k != 2) ps.push_back(k);
    for (int p : ps) {
      const rotations::FrameConfig frame{n, k};
      auto h = [&](const rotations::Rotation& u) { return rotations::hkp_exact_gaussian(sigma, u, frame, p).value; };
      const auto L = rotations::empirical_log_lipschitz(h, frame, probes, delta, config.seed);
      for (auto [type, value] : {std::pair{"type1", L.type1}, {"type2", L.type2}, {"type3", L.type3}, {"general", L.general}})
        table.rows.push_back({integer(n), integer(k), integer(p), text(type), num(delta), num(value), text("gaussian-exact")});
      result.records.push_back(make_record(
          "log-lipschitz estimate", Verdict::report_only, {{"n", integer(n)}, {"k", integer(k)}, {"p", integer(p)}},
          {{"L_type1", num(L.type1)}, {"L_type2", num(L.type2)}, {"L_type3", num(L.type3)},
           {"L_general", num(L.general)}, {"L_overall", num(L.overall)}, {"L_half_step", num(L.overall_half_step)},
           {"richardson_consistent", L.richardson_consistent}}));
      log_size.push_back(std::log(static_cast<double>(std::max(k, p))));
      log_L.push_back(std::log(L.overall));
    }
  }
  const double exponent = fit_line(log_size, log_L).slope;
  result.records.push_back(make_record("log-lipschitz growth exponent", Verdict::report_only, {{"n", integer(n)}},
                                       {{"exponent", num(exponent)}, {"within_limit", exponent <= 1.15}}));
  const rotations::FrameConfig frame{n, 2};
  auto h_iso = [&](const rotations::Rotation& u) { return rotations::hkp_exact_gaussian(identity, u, frame, 2.0).value; };
  const auto iso = rotations::empirical_log_lipschitz(h_iso, frame, std::min(probes, 16), delta, config.seed);
  result.records.push_back(make_record("isotropic invariance", hard(iso.overall < 1e-6), {{"n", integer(n)}},
                                       {{"L_overall", num(iso.overall)}}));
  result.tables.push_back(std::move(table));
  return result;
}

ExperimentResult reverse_holder(const ExperimentConfig& config) {
  ExperimentResult result;
  const int n = config.n_or(12);
  const int samples = config.get_int("haar_samples", 1000);
  const int probes = config.get_int("probes", 32);
  const Eigen::MatrixXd sigma = anisotropic_sigma(n);
  struct Case {
    int k;
    double p, q, r;
  };
  for (const Case& c : {Case{2, 2.0, 2.0, 1.0}, Case{4, 1.0, 1.0, 0.5}}) {
    const rotations::FrameConfig frame{n, c.k};
    auto h = [&](const rotations::Rotation& u) { return rotations::hkp_exact_gaussian(sigma, u, frame, c.p).value; };
    const auto L = rotations::empirical_log_lipschitz(h, frame, probes, 1e-3, config.seed);
    std::vector<double> values(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i)
      values[static_cast<std::size_t>(i)] = h(rotations::haar_rotation(n, config.seed ^ 0x5a5a5a5aULL, static_cast<std::uint64_t>(i)));
    const auto r = rotations::reverse_holder_check(values, L.overall, c.q, c.r, n);
    result.records.push_back(make_record(
        "reverse hoelder constant", hard(r.finite),
        {{"n", integer(n)}, {"k", integer(c.k)}, {"p", num(c.p)}, {"q", num(c.q)}, {"r", num(c.r)}},
        {{"fitted_K", num(r.fitted_K)}, {"log_ratio", num(r.log_ratio)}, {"L", num(L.overall)}}));
  }
  return result;
}

// ---- bodies ----

ExperimentResult zq_chains(const ExperimentConfig& config) {
  ExperimentResult result;
  const std::vector<int> dims = ints_or(config.n_grid, {1, 2});
  for (int m : dims) {
    const auto dirs = directions_for(m, config, 16);
    for (Family family : families_of(config, distributions::all_families())) {
      const auto inst = density_instance(family, m);
      for (auto id : {bodies::RelationId::zq_chain, bodies::RelationId::zqplus_chain, bodies::RelationId::kq_chain})
        for (auto [q1, q2] : {std::pair{1.0, 2.0}, {2.0, 4.0}})
          result.records.push_back(relation_record(id, inst, {q1, q2}, dirs));
    }
  }
  return result;
}

ExperimentResult zk_identity(const ExperimentConfig& config) {
  ExperimentResult result;
  const auto dirs = directions_for(1, config, 16);
  for (Family family : families_of(config, {Family::product_shifted_exponential, Family::product_laplace,
                                            Family::gaussian, Family::uniform_cube})) {
    const auto inst = density_instance(family, 1);
    for (double q : grid_or(config.p_grid, {1.0, 2.0, 4.0}))
      result.records.push_back(relation_record(bodies::RelationId::zk_identity, inst, {q, q}, dirs));
  }
  return result;
}

ExperimentResult sandwich(const ExperimentConfig& config) {
  ExperimentResult result;
  for (int m : ints_or(config.n_grid, {1, 2})) {
    const auto dirs = directions_for(m, config, 32);
    for (Family family : families_of(config, {Family::product_shifted_exponential})) {
      const auto inst = density_instance(family, m);
      for (double q : grid_or(config.p_grid, {1.0, 2.0, 4.0})) {
        ReportRecord r = relation_record(bodies::RelationId::sandwich, inst, {q, q}, dirs);
        for (const auto& [k, v] : r.metrics)
          if (k == "C2/C1") r.metrics.emplace_back("within_limit", std::get<double>(v) <= 20.0);
        result.records.push_back(std::move(r));
      }
    }
  }
  return result;
}

ExperimentResult add_g(const ExperimentConfig& config) {
  ExperimentResult result;
  const int n = config.n_or(4);
  const std::size_t N = config.samples(50000);
  const std::vector<double> q_grid = grid_or(config.p_grid, {2.0, 4.0, 8.0});
  const auto dirs = bodies::default_directions(n, config.seed);
  for (Family family : families_of(config, {Family::product_laplace, Family::gaussian})) {
    const auto spec = distributions::make_density(family, n);
    const auto profile = distributions::estimate_psi_alpha(spec, spec.default_alpha(), linspace(2.0, 16.0, 1.0), 16, config.seed);
    for (const auto& [label, matrix] : {std::pair<std::string, Eigen::MatrixXd>{"identity", Eigen::MatrixXd::Identity(n, n)},
                                        {"anisotropic", anisotropic_map(n)}}) {
      bodies::RelationInstance inst;
      inst.descriptor = spec.descriptor() + " A=" + label;
      inst.batch = distributions::sample(spec, static_cast<Eigen::Index>(N), config.seed);
      inst.map = distributions::LinearMap(matrix);
      inst.profile = profile;
      for (double q : q_grid) {
        result.records.push_back(relation_record(bodies::RelationId::add_g, inst, {q, q}, dirs));
        result.records.push_back(relation_record(bodies::RelationId::cor_dist, inst, {q, q}, dirs));
      }
    }
  }
  return result;
}

ExperimentResult thm_dist(const ExperimentConfig& config) {
  ExperimentResult result;
  for (int m : ints_or(config.n_grid, {1, 2})) {
    const auto dirs = directions_for(m, config, 16);
    for (Family family : families_of(config, {Family::gaussian, Family::product_laplace, Family::product_shifted_exponential}))
      for (double p : grid_or(config.p_grid, {1.0, 2.0, 4.0}))
        result.records.push_back(relation_record(bodies::RelationId::thm_dist, density_instance(family, m), {p, p}, dirs));
  }
  return result;
}

ExperimentResult marginal_halfspace(const ExperimentConfig& config) {
  ExperimentResult result;
  for (int m : ints_or(config.n_grid, {1, 2})) {
    const auto dirs = directions_for(m, config, 8);
    for (Family family : families_of(config, {Family::gaussian, Family::product_laplace,
                                              Family::product_shifted_exponential, Family::uniform_cube})) {
      const auto inst = density_instance(family, m);
      for (double q : grid_or(config.p_grid, {1.0, 2.0, 4.0})) {
        result.records.push_back(relation_record(bodies::RelationId::marginal_a1, inst, {q, q}, dirs));
        result.records.push_back(relation_record(bodies::RelationId::halfspace_a3, inst, {q, q}, dirs));
      }
    }
  }
  return result;
}

ExperimentResult z2plus(const ExperimentConfig& config) {
  ExperimentResult result;
  const int n = config.n_or(4);
  const std::size_t N = config.samples(100000);
  const auto dirs = bodies::default_directions(n, config.seed);
  for (Family family : families_of(config, distributions::all_families())) {
    const auto spec = distributions::make_density(family, n);
    bodies::RelationInstance inst;
    inst.descriptor = spec.descriptor();
    inst.batch = distributions::sample(spec, static_cast<Eigen::Index>(N), config.seed);
    result.records.push_back(relation_record(bodies::RelationId::z2plus, inst, {2.0, 2.0}, dirs));
  }
  return result;
}

ExperimentResult kq_norm(const ExperimentConfig& config) {
  ExperimentResult result;
  bodies::DensityEvaluator box;
  box.dim = 1;
  box.value = [](const Eigen::VectorXd& x) { return std::abs(x(0)) <= 1.0 ? 1.0 : 0.0; };
  box.breakpoints = [](const Eigen::VectorXd& o, const Eigen::VectorXd& d) {
    std::vector<double> out;
    for (double edge : {-1.0, 1.0}) {
      const double t = (edge - o(0)) / d(0);
      if (t > 0.0) out.push_back(t);
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  box.descriptor = "indicator[-1,1]";
  for (double q : {1.0, 2.0, 4.0, 8.0}) {
    const auto body = bodies::kq_body(box, q);
    double worst = 0.0;
    for (double s : {1.0, -1.0}) worst = std::max(worst, std::abs(body.radial(Eigen::VectorXd::Constant(1, s)).value - 1.0));
    result.records.push_back(make_record("ball body fixed point", hard(worst <= 1e-10), {{"q", num(q)}},
                                         {{"max_radius_error", num(worst)}}));
  }
  const int pairs = config.get_int("pairs", 10000);
  for (Family family : families_of(config, {Family::gaussian, Family::product_laplace, Family::product_shifted_exponential})) {
    const auto spec = distributions::make_density(family, 2);
    const auto body = bodies::kq_body(bodies::DensityEvaluator::from_spec(spec), 2.0);
    const auto t = bodies::triangle_inequality_check(body, pairs, config.seed);
    result.records.push_back(make_record("ball body triangle inequality", hard(t.holds),
                                         {{"family", text(distributions::to_string(family))}, {"q", num(2.0)},
                                          {"pairs", integer(t.pairs)}},
                                         {{"violations", integer(t.violations)}, {"worst_slack", num(t.worst_slack)}}));
  }
  return result;
}

}  // namespace

const std::vector<ExperimentInfo>& registry() {
  static const std::vector<ExperimentInfo> entries{
      {"thm1.1-tail-fit", "norm deviation decays like C exp(-c nbar^(alpha/2) min(t^(2+alpha), t))",
       "fit the deviation form to Clopper-Pearson tail envelopes", tail_fit},
      {"thm2.1-loglip-scan", "log-Lipschitz constant of h_{k,p} grows at most like max(k,p)^(1/alpha+1/2)",
       "finite-difference log-Lipschitz scan with the exact Gaussian oracle", loglip_scan},
      {"propA-sandwich", "vol(K_{m+q})^(1/q) K_{m+q} is sandwiched between multiples of Z_q^+",
       "sandwich constants on shifted-exponential products", sandwich},
      {"grunbaum", "a mean-zero log-concave variable is nonnegative with probability in [1/e, 1-1/e]",
       "quadrature masses of zoo marginals", grunbaum},
      {"borell-concavity", "q -> log(int t^q w / Gamma(q+1)) is concave for log-concave w",
       "second differences of the moment profile", borell},
      {"so1-identity", "E|Y|^p equals the Gamma-weighted Haar average of E|P_F Y|^p",
       "two-sided Monte Carlo of the projection identity", so1_identity},
      {"entropy-decomp", "entropy of the mixture splits into mean entropy plus entropy of h",
       "algebraic identity on discretized radial laws", entropy_decomp},
      {"reduction", "normalized p-moments of AX are bounded by squared normalized 2p-moments of Y",
       "Monte Carlo of both sides", reduction},
      {"cheeger", "the Bobkov quantity decays no faster than n^(-5/12)", "exponent fit over the thin-shell scan",
       cheeger},
      {"reverse-holder", "Lipschitz h on SO(n) satisfies a reverse Hoelder inequality with constant L^2/n",
       "fitted constant over Haar samples", reverse_holder},
      {"gamma-decr", "the Gaussian moment ratio term is non-increasing in p", "finite differences on a (k, n) grid",
       gamma_decr},
      {"stirling-bound", "d/dp (1/p) log(Gamma(k+p)/Gamma(k)) is at most C/k", "finite differences on a k grid",
       stirling_bound},
      {"zq-chains", "Z_q, Z_q^+ and K_q scale monotonically in q within explicit constants",
       "inclusion constants along direction grids", zq_chains},
      {"zk-identity", "Z_q^+ of the uniform measure on K_{m+q}(w) equals Z_q^+(w)",
       "polar against Cartesian quadrature", zk_identity},
      {"addG", "Gaussian convolution bounds Z_q^+ from below and above", "Monte Carlo supports of Y", add_g},
      {"a1-a3-appendix", "marginal and half-space volume bounds for Ball's bodies",
       "quadrature on planar and one-dimensional densities", marginal_halfspace},
      {"z2plus", "c B subset Z_2^+ subset sqrt(2) B for isotropic log-concave measures", "Monte Carlo supports",
       z2plus},
      {"moment-curve", "normalized moments of a standard Gaussian have a closed form",
       "bootstrap moment-ratio curve against the closed form", moment_curve},
      {"thin-shell", "sqrt(Var|X|) is at most C n^(1/3)", "norm standard deviation across dimensions", thin_shell},
      {"moments-tails", "Markov bounds from moments dominate tails; tails integrate to negative moments",
       "moments to tails and back", moments_tails},
      {"kq-norm", "Ball's body of an indicator is its support interval and its gauge is a norm",
       "fixed point and triangle inequality", kq_norm},
      {"thm-dist", "the distance of K_{m+p} to the ball is controlled by that of Z^+_{max(p,m)}",
       "fitted distance constants", thm_dist},
  };
  return entries;
}

}  // namespace thinshell::harness
