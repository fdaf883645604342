#include "thinshell/bodies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>

#include "thinshell/radial1d.hpp"
#include "thinshell/rng.hpp"
#include "thinshell/special.hpp"

namespace thinshell::bodies {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

void require_unit(const Eigen::VectorXd& theta, int m) {
  if (theta.size() != m) throw std::invalid_argument("direction has the wrong dimension");
  if (std::abs(theta.norm() - 1.0) > 1e-9) throw std::invalid_argument("direction must be a unit vector");
}

Eigen::VectorXd planar(double angle) { return Eigen::Vector2d(std::cos(angle), std::sin(angle)); }

radial::RadialFunction ray_function(const DensityEvaluator& w, const Eigen::VectorXd& origin,
                                    const Eigen::VectorXd& dir) {
  radial::RadialFunction r;
  r.evaluator = [&w, origin, dir](double t) { return w.value(origin + t * dir); };
  r.lo = 0.0;
  r.log_concave = true;
  if (w.breakpoints) r.breakpoints = w.breakpoints(origin, dir);
  return r;
}

// Density of ⟨X, θ⟩ under w by integrating over the orthogonal line (m ≤ 2).
radial::RadialFunction cartesian_marginal(const DensityEvaluator& w, const Eigen::VectorXd& theta) {
  radial::RadialFunction f;
  f.log_concave = true;
  if (w.dim == 1) {
    f.evaluator = [&w, theta](double t) { return w.value(t * theta); };
    if (w.breakpoints) {
      for (double b : w.breakpoints(Eigen::VectorXd::Zero(1), theta)) f.breakpoints.push_back(b);
      for (double b : w.breakpoints(Eigen::VectorXd::Zero(1), -theta)) f.breakpoints.push_back(-b);
      std::sort(f.breakpoints.begin(), f.breakpoints.end());
    }
    return f;
  }
  if (w.dim != 2) throw UnsupportedRelation("marginal quadrature supports m ≤ 2");
  const Eigen::VectorXd perp = Eigen::Vector2d(-theta(1), theta(0));
  f.evaluator = [&w, theta, perp](double t) {
    const Eigen::VectorXd origin = t * theta;
    const double forward = radial::radial_moment(ray_function(w, origin, perp), 0.0, 1e-12).value;
    const double backward = radial::radial_moment(ray_function(w, origin, -perp), 0.0, 1e-12).value;
    return forward + backward;
  };
  return f;
}

// Integral over S^{m-1} (counting measure for m = 1), optionally over the
// closed hemisphere {⟨ξ, pole⟩ ≥ 0}.
double sphere_integral(int m, const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& pole,
                       bool hemisphere) {
  if (m == 1) return f(pole) + (hemisphere ? 0.0 : f(-pole));
  if (m == 2) {
    const double base = std::atan2(pole(1), pole(0));
    const double half = hemisphere ? 0.5 * kPi : kPi;
    std::vector<double> kinks;
    for (int k = -8; k <= 8; ++k) {
      const double u = k * 0.5 * kPi - base;
      if (u > -half && u < half) kinks.push_back(u);
    }
    auto g = [&](double u) { return f(planar(base + u)); };
    return radial::integrate(g, -half, half, 1e-11, kinks).value;
  }
  if (m == 3) {
    // Gauss–Legendre in z = ⟨ξ, pole⟩ times a periodic trapezoid in azimuth.
    Eigen::Vector3d p = pole.head<3>();
    Eigen::Vector3d helper = std::abs(p(0)) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
    Eigen::Vector3d e1 = (helper - helper.dot(p) * p).normalized();
    Eigen::Vector3d e2 = p.cross(e1);
    constexpr int kAzimuth = 128;
    auto ring = [&](double z) {
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      double acc = 0.0;
      for (int j = 0; j < kAzimuth; ++j) {
        const double phi = 2.0 * kPi * j / kAzimuth;
        const Eigen::VectorXd xi = z * p + r * (std::cos(phi) * e1 + std::sin(phi) * e2);
        acc += f(xi);
      }
      return acc * 2.0 * kPi / kAzimuth;
    };
    const double lower = hemisphere ? 0.0 : -1.0;
    return radial::integrate(ring, lower, 1.0, 1e-9, std::vector<double>{0.0}).value;
  }
  throw std::invalid_argument("sphere_integral: deterministic grids cover m ≤ 3");
}

double monte_carlo_power_mean(const StarBodyOracle& oracle, const Eigen::VectorXd* pole) {
  constexpr int kDirections = 20000;
  const auto dirs = distributions::sample_directions(oracle.dim, kDirections, 0x5eed);
  double acc = 0.0;
  for (const auto& xi : dirs) {
    if (pole && xi.dot(*pole) < 0.0) continue;
    acc += std::pow(oracle.radial(xi).value, oracle.dim);
  }
  return acc / kDirections;
}

Evaluation mc_moment_support(const distributions::SampleBatch& batch, double q, const Eigen::VectorXd& theta,
                             bool one_sided) {
  if (q < 1.0) throw std::invalid_argument("support: q must be at least 1");
  require_unit(theta, batch.dim());
  const Eigen::VectorXd proj = batch.values * theta;
  const auto count = static_cast<double>(proj.size());
  double top = 0.0;
  for (Eigen::Index i = 0; i < proj.size(); ++i) {
    const double x = one_sided ? std::max(proj(i), 0.0) : std::abs(proj(i));
    top = std::max(top, x);
  }
  if (!(top > 0.0)) throw std::domain_error("support: all projections are non-positive");
  double sum = 0.0, sum_sq = 0.0;
  for (Eigen::Index i = 0; i < proj.size(); ++i) {
    const double x = one_sided ? std::max(proj(i), 0.0) : std::abs(proj(i));
    const double y = x > 0.0 ? std::exp(q * std::log(x / top)) : 0.0;
    sum += y;
    sum_sq += y * y;
  }
  const double mean_scaled = sum / count;
  const double var_scaled = std::max(0.0, sum_sq / count - mean_scaled * mean_scaled) * count / (count - 1.0);
  const double factor = one_sided ? 2.0 : 1.0;
  Evaluation out;
  out.value = top * std::exp(std::log(factor * mean_scaled) / q);
  out.std_error = out.value * std::sqrt(var_scaled / count) / (q * mean_scaled);
  return out;
}

Evaluation quadrature_support(const radial::RadialFunction& marginal, double q, bool one_sided) {
  if (q < 1.0) throw std::invalid_argument("support: q must be at least 1");
  const double plus = radial::radial_moment(marginal, q, 1e-11).value;
  double total = 2.0 * plus;
  if (!one_sided) total = plus + radial::radial_moment(marginal.reflected(), q, 1e-11).value;
  if (!(total > 0.0)) throw std::domain_error("support: vanishing moment");
  return {std::pow(total, 1.0 / q), 0.0};
}

}  // namespace

Evaluation StarBodyOracle::rho(const Eigen::VectorXd& x) const {
  if (!radial) throw std::logic_error("oracle has no radial evaluator");
  const double r = x.norm();
  if (!(r > 0.0)) throw std::invalid_argument("rho: zero vector");
  const Evaluation e = radial(x / r);
  return {e.value / r, e.std_error / r};
}

Evaluation StarBodyOracle::h(const Eigen::VectorXd& x) const {
  if (!support) throw std::logic_error("oracle has no support evaluator");
  const double r = x.norm();
  if (!(r > 0.0)) return {0.0, 0.0};
  const Evaluation e = support(x / r);
  return {e.value * r, e.std_error * r};
}

Evaluation StarBodyOracle::gauge(const Eigen::VectorXd& x) const {
  if (!radial) throw std::logic_error("oracle has no radial evaluator");
  const double r = x.norm();
  if (!(r > 0.0)) return {0.0, 0.0};
  const Evaluation e = radial(x / r);
  if (!(e.value > 0.0)) throw std::domain_error("gauge: non-positive radial value");
  return {r / e.value, r * e.std_error / (e.value * e.value)};
}

StarBodyOracle StarBodyOracle::scaled(double factor) const {
  StarBodyOracle out = *this;
  if (radial) {
    auto inner = radial;
    out.radial = [inner, factor](const Eigen::VectorXd& t) {
      const Evaluation e = inner(t);
      return Evaluation{e.value * factor, e.std_error * factor};
    };
  }
  if (support) {
    auto inner = support;
    out.support = [inner, factor](const Eigen::VectorXd& t) {
      const Evaluation e = inner(t);
      return Evaluation{e.value * factor, e.std_error * factor};
    };
  }
  std::ostringstream os;
  os << factor << "*" << descriptor;
  out.descriptor = os.str();
  return out;
}

StarBodyOracle StarBodyOracle::ball(int m, double radius) {
  StarBodyOracle out;
  out.dim = m;
  out.radial = [radius](const Eigen::VectorXd&) { return Evaluation{radius, 0.0}; };
  out.support = [radius](const Eigen::VectorXd&) { return Evaluation{radius, 0.0}; };
  std::ostringstream os;
  os << "ball(m=" << m << ",r=" << radius << ")";
  out.descriptor = os.str();
  return out;
}

StarBodyOracle StarBodyOracle::ellipsoid(const Eigen::VectorXd& semiaxes) {
  StarBodyOracle out;
  out.dim = static_cast<int>(semiaxes.size());
  out.radial = [semiaxes](const Eigen::VectorXd& t) {
    return Evaluation{1.0 / t.cwiseQuotient(semiaxes).norm(), 0.0};
  };
  out.support = [semiaxes](const Eigen::VectorXd& t) { return Evaluation{t.cwiseProduct(semiaxes).norm(), 0.0}; };
  out.descriptor = "ellipsoid";
  return out;
}

DensityEvaluator DensityEvaluator::from_spec(const distributions::DensitySpec& spec) {
  DensityEvaluator w;
  w.dim = spec.dim();
  w.value = [spec](const Eigen::VectorXd& x) { return std::exp(spec.log_density(x)); };
  w.breakpoints = [spec](const Eigen::VectorXd& o, const Eigen::VectorXd& d) { return spec.ray_breakpoints(o, d); };
  w.descriptor = spec.descriptor();
  return w;
}

DensityEvaluator DensityEvaluator::scaled_values(double factor) const {
  DensityEvaluator out = *this;
  auto inner = value;
  out.value = [inner, factor](const Eigen::VectorXd& x) { return factor * inner(x); };
  return out;
}

DirectionSet DirectionSet::sampled(int m, int count, std::uint64_t seed) {
  DirectionSet set;
  set.generation = Generation::sampled;
  set.seed = seed;
  set.directions = distributions::sample_directions(m, count, seed);
  return set;
}

DirectionSet DirectionSet::antipodal_sampled(int m, int pairs, std::uint64_t seed) {
  DirectionSet set;
  set.generation = Generation::antipodal_sampled;
  set.seed = seed;
  for (const auto& v : distributions::sample_directions(m, pairs, seed)) {
    set.directions.push_back(v);
    set.directions.push_back(-v);
  }
  return set;
}

DirectionSet DirectionSet::axis_and_diagonals(int m) {
  DirectionSet set;
  set.generation = Generation::axis_and_diagonals;
  for (int i = 0; i < m; ++i) {
    for (double s : {1.0, -1.0}) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(m);
      v(i) = s;
      set.directions.push_back(v);
    }
  }
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      for (double si : {1.0, -1.0})
        for (double sj : {1.0, -1.0}) {
          Eigen::VectorXd v = Eigen::VectorXd::Zero(m);
          v(i) = si / std::numbers::sqrt2;
          v(j) = sj / std::numbers::sqrt2;
          set.directions.push_back(v);
        }
  return set;
}

DirectionSet DirectionSet::planar_grid(int count) {
  DirectionSet set;
  set.generation = Generation::planar_grid;
  for (int k = 0; k < count; ++k) set.directions.push_back(planar(2.0 * kPi * k / count));
  return set;
}

DirectionSet default_directions(int m, std::uint64_t seed) {
  DirectionSet set = DirectionSet::axis_and_diagonals(m);
  if (m == 1) return set;
  const int target = 64 * m;
  const int pairs = std::max(0, (target - static_cast<int>(set.size())) / 2);
  const DirectionSet extra = DirectionSet::antipodal_sampled(m, pairs, seed);
  set.directions.insert(set.directions.end(), extra.directions.begin(), extra.directions.end());
  set.generation = DirectionSet::Generation::antipodal_sampled;
  set.seed = seed;
  return set;
}

Evaluation zq_plus_support(const distributions::SampleBatch& batch, double q, const Eigen::VectorXd& theta) {
  return mc_moment_support(batch, q, theta, true);
}

Evaluation zq_support(const distributions::SampleBatch& batch, double q, const Eigen::VectorXd& theta) {
  return mc_moment_support(batch, q, theta, false);
}

Evaluation zq_plus_support(const distributions::DensitySpec& spec, double q, const Eigen::VectorXd& theta) {
  require_unit(theta, spec.dim());
  return quadrature_support(radial::marginal_1d(spec, theta), q, true);
}

Evaluation zq_support(const distributions::DensitySpec& spec, double q, const Eigen::VectorXd& theta) {
  require_unit(theta, spec.dim());
  return quadrature_support(radial::marginal_1d(spec, theta), q, false);
}

Evaluation zq_plus_support(const DensityEvaluator& w, double q, const Eigen::VectorXd& theta) {
  require_unit(theta, w.dim);
  return quadrature_support(cartesian_marginal(w, theta), q, true);
}

Evaluation zq_support(const DensityEvaluator& w, double q, const Eigen::VectorXd& theta) {
  require_unit(theta, w.dim);
  return quadrature_support(cartesian_marginal(w, theta), q, false);
}

Evaluation zq_plus_support(const StarBodyOracle& body, double q, const Eigen::VectorXd& theta) {
  if (q < 1.0) throw std::invalid_argument("support: q must be at least 1");
  require_unit(theta, body.dim);
  const int m = body.dim;
  auto integrand = [&](const Eigen::VectorXd& xi) {
    const double c = xi.dot(theta);
    if (c <= 0.0) return 0.0;
    return std::exp((m + q) * std::log(body.radial(xi).value) + q * std::log(c));
  };
  const double integral = sphere_integral(m, integrand, theta, true);
  return {std::pow(2.0 * integral / (m + q), 1.0 / q), 0.0};
}

StarBodyOracle zq_plus_body(const distributions::SampleBatch& batch, double q) {
  auto shared = std::make_shared<distributions::SampleBatch>(batch);
  StarBodyOracle out;
  out.dim = batch.dim();
  out.support = [shared, q](const Eigen::VectorXd& t) { return zq_plus_support(*shared, q, t); };
  out.descriptor = "Zq+(" + batch.spec_ref + ")";
  return out;
}

StarBodyOracle zq_plus_body(const DensityEvaluator& w, double q) {
  StarBodyOracle out;
  out.dim = w.dim;
  out.support = [w, q](const Eigen::VectorXd& t) { return zq_plus_support(w, q, t); };
  out.descriptor = "Zq+(" + w.descriptor + ")";
  return out;
}

StarBodyOracle zq_body(const distributions::SampleBatch& batch, double q) {
  auto shared = std::make_shared<distributions::SampleBatch>(batch);
  StarBodyOracle out;
  out.dim = batch.dim();
  out.support = [shared, q](const Eigen::VectorXd& t) { return zq_support(*shared, q, t); };
  out.descriptor = "Zq(" + batch.spec_ref + ")";
  return out;
}

StarBodyOracle zq_body(const DensityEvaluator& w, double q) {
  StarBodyOracle out;
  out.dim = w.dim;
  out.support = [w, q](const Eigen::VectorXd& t) { return zq_support(w, q, t); };
  out.descriptor = "Zq(" + w.descriptor + ")";
  return out;
}

StarBodyOracle kq_body(const DensityEvaluator& w, double q) {
  if (q < 1.0) throw std::invalid_argument("kq_body: q must be at least 1");
  if (!(w.value(Eigen::VectorXd::Zero(w.dim)) > 0.0)) throw std::domain_error("kq_body: w(0) must be positive");
  StarBodyOracle out;
  out.dim = w.dim;
  out.origin_interior = true;
  out.radial = [w, q](const Eigen::VectorXd& theta) {
    const auto ray = ray_function(w, Eigen::VectorXd::Zero(w.dim), theta);
    const double moment = radial::radial_moment(ray, q - 1.0, 1e-12).value;
    return Evaluation{std::pow(q * moment, 1.0 / q), 0.0};
  };
  std::ostringstream os;
  os << "K" << q << "(" << w.descriptor << ")";
  out.descriptor = os.str();
  return out;
}

TriangleReport triangle_inequality_check(const StarBodyOracle& oracle, int pair_count, std::uint64_t seed) {
  TriangleReport report;
  report.worst_slack = -kInf;
  const int m = oracle.dim;
  for (int i = 0; i < pair_count; ++i) {
    CounterRng rng(seed, Stream::pairs, static_cast<std::uint64_t>(i));
    Eigen::VectorXd x(m), y(m);
    for (int j = 0; j < m; ++j) x(j) = rng.normal();
    for (int j = 0; j < m; ++j) y(j) = rng.normal();
    const Evaluation gx = oracle.gauge(x);
    const Evaluation gy = oracle.gauge(y);
    const Evaluation gs = oracle.gauge(x + y);
    const double slack = gs.value - gx.value - gy.value;
    const double err = std::sqrt(gx.std_error * gx.std_error + gy.std_error * gy.std_error + gs.std_error * gs.std_error);
    const double tol = 3.0 * err + 1e-9 * (gx.value + gy.value);
    report.worst_slack = std::max(report.worst_slack, slack);
    if (slack > tol) {
      ++report.violations;
      report.max_violation = std::max(report.max_violation, slack - tol);
    }
    ++report.pairs;
  }
  report.holds = report.violations == 0;
  return report;
}

DistanceEstimate dist_to_ball(const StarBodyOracle& oracle, const DirectionSet& directions) {
  if (!oracle.origin_interior) throw std::invalid_argument("dist_to_ball: origin must be interior");
  if (static_cast<int>(directions.size()) < 2 * oracle.dim)
    throw std::invalid_argument("dist_to_ball: need at least 2m directions");
  const auto& eval = oracle.has_radial() ? oracle.radial : oracle.support;
  if (!eval) throw std::invalid_argument("dist_to_ball: oracle has no evaluator");
  DistanceEstimate out;
  out.min_value = kInf;
  out.max_value = 0.0;
  for (const auto& theta : directions.directions) {
    const double v = eval(theta).value;
    if (!(v > 0.0)) throw std::domain_error("dist_to_ball: non-positive value");
    out.min_value = std::min(out.min_value, v);
    out.max_value = std::max(out.max_value, v);
  }
  out.ratio = out.max_value / out.min_value;
  out.direction_count = directions.size();
  return out;
}

InclusionReport inclusion_constants(const StarBodyOracle& K, const StarBodyOracle& L, const DirectionSet& directions,
                                    std::optional<Window> window) {
  if (K.dim != L.dim) throw std::invalid_argument("inclusion_constants: dimension mismatch");
  const DirectionalEvaluator* ek = nullptr;
  const DirectionalEvaluator* el = nullptr;
  if (K.has_radial() && L.has_radial()) {
    ek = &K.radial;
    el = &L.radial;
  } else if (K.has_support() && L.has_support()) {
    ek = &K.support;
    el = &L.support;
  } else {
    throw std::invalid_argument("inclusion_constants: evaluator kind mismatch");
  }
  InclusionReport report;
  report.instance = K.descriptor + " vs " + L.descriptor;
  report.c1 = kInf;
  report.c2 = -kInf;
  bool finite = true;
  for (const auto& theta : directions.directions) {
    const Evaluation a = (*ek)(theta);
    const Evaluation b = (*el)(theta);
    if (!(a.value > 0.0) || !(b.value > 0.0)) {
      finite = false;
      continue;
    }
    const double r = a.value / b.value;
    const double se = r * std::hypot(a.std_error / a.value, b.std_error / b.value);
    if (r < report.c1) {
      report.c1 = r;
      report.c1_radius = 3.0 * se;
    }
    if (r > report.c2) {
      report.c2 = r;
      report.c2_radius = 3.0 * se;
    }
  }
  report.direction_count = directions.size();
  report.verdict = finite && std::isfinite(report.c1) && std::isfinite(report.c2);
  if (window) {
    report.verdict = report.verdict && report.c1 >= window->lo - report.c1_radius - 1e-12 &&
                     report.c2 <= window->hi + report.c2_radius + 1e-12;
  }
  return report;
}

double volume(const StarBodyOracle& oracle) {
  const int m = oracle.dim;
  if (m > 3) return std::exp(log_unit_ball_volume(m)) * monte_carlo_power_mean(oracle, nullptr);
  auto f = [&](const Eigen::VectorXd& xi) { return std::pow(oracle.radial(xi).value, m); };
  Eigen::VectorXd pole = Eigen::VectorXd::Zero(m);
  pole(0) = 1.0;
  return sphere_integral(m, f, pole, false) / m;
}

double halfspace_volume(const StarBodyOracle& oracle, const Eigen::VectorXd& theta) {
  const int m = oracle.dim;
  require_unit(theta, m);
  if (m > 3) return std::exp(log_unit_ball_volume(m)) * monte_carlo_power_mean(oracle, &theta);
  auto f = [&](const Eigen::VectorXd& xi) { return std::pow(oracle.radial(xi).value, m); };
  return sphere_integral(m, f, theta, true) / m;
}

double halfspace_fraction(const StarBodyOracle& oracle, const Eigen::VectorXd& theta) {
  return halfspace_volume(oracle, theta) / volume(oracle);
}

double support_from_radial(const StarBodyOracle& oracle, const Eigen::VectorXd& theta) {
  const int m = oracle.dim;
  require_unit(theta, m);
  if (m == 1) return oracle.radial(theta).value;
  if (m != 2) throw std::invalid_argument("support_from_radial: supports m ≤ 2");
  const double base = std::atan2(theta(1), theta(0));
  auto g = [&](double u) { return oracle.radial(planar(base + u)).value * std::cos(u); };
  constexpr int kScan = 64;
  double best = -kInf;
  int best_index = 0;
  for (int j = 0; j <= kScan; ++j) {
    const double u = -0.5 * kPi + kPi * j / kScan;
    const double v = g(u);
    if (v > best) {
      best = v;
      best_index = j;
    }
  }
  const double step = kPi / kScan;
  const double lo = std::max(-0.5 * kPi, -0.5 * kPi + step * (best_index - 1));
  const double hi = std::min(0.5 * kPi, -0.5 * kPi + step * (best_index + 1));
  const double u = radial::golden_section_argmax(g, lo, hi, 1e-12);
  return std::max(best, g(u));
}

double chord_length(const StarBodyOracle& oracle, const Eigen::VectorXd& theta, double t) {
  if (oracle.dim != 2) throw std::invalid_argument("chord_length: planar bodies only");
  require_unit(theta, 2);
  const Eigen::VectorXd perp = Eigen::Vector2d(-theta(1), theta(0));
  double reach = 0.0;
  for (const auto& d : DirectionSet::planar_grid(16).directions) reach = std::max(reach, oracle.radial(d).value);
  const double span = 4.0 * reach + std::abs(t);
  auto gauge_at = [&](double s) { return oracle.gauge(t * theta + s * perp).value; };
  const double s_star = radial::golden_section_argmax([&](double s) { return -gauge_at(s); }, -span, span, 1e-13);
  if (gauge_at(s_star) > 1.0) return 0.0;
  auto crossing = [&](double inside, double outside) {
    for (int iter = 0; iter < 200 && std::abs(outside - inside) > 1e-14 * span; ++iter) {
      const double mid = 0.5 * (inside + outside);
      (gauge_at(mid) <= 1.0 ? inside : outside) = mid;
    }
    return 0.5 * (inside + outside);
  };
  return crossing(s_star, span) - crossing(s_star, -span);
}

}  // namespace thinshell::bodies
