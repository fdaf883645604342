#include "thinshell/radial1d.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <numbers>
#include <queue>

#include <boost/math/special_functions/gamma.hpp>

#include "thinshell/special.hpp"
#include "thinshell/stats.hpp"

namespace thinshell::radial {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kOrder = 10;
constexpr int kMaxIntervals = 4000;

struct Rule {
  std::array<double, kOrder> nodes{};
  std::array<double, kOrder> weights{};
};

const Rule& legendre_rule() {
  static const Rule rule = [] {
    Rule r;
    for (int i = 0; i < kOrder; ++i) {
      long double x = std::cos(std::numbers::pi_v<long double> * (i + 0.75L) / (kOrder + 0.5L));
      long double dp = 0.0L;
      for (int iter = 0; iter < 100; ++iter) {
        long double p0 = 1.0L, p1 = x;
        for (int k = 2; k <= kOrder; ++k) {
          const long double p2 = ((2.0L * k - 1.0L) * x * p1 - (k - 1.0L) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = kOrder * (x * p1 - p0) / (x * x - 1.0L);
        const long double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-19L) break;
      }
      r.nodes[static_cast<std::size_t>(i)] = static_cast<double>(x);
      r.weights[static_cast<std::size_t>(i)] = static_cast<double>(2.0L / ((1.0L - x * x) * dp * dp));
    }
    return r;
  }();
  return rule;
}

double gauss_legendre(const std::function<double(double)>& f, double a, double b) {
  const Rule& rule = legendre_rule();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double acc = 0.0;
  for (int i = 0; i < kOrder; ++i)
    acc += rule.weights[static_cast<std::size_t>(i)] * f(mid + half * rule.nodes[static_cast<std::size_t>(i)]);
  return acc * half;
}

struct Panel {
  double a = 0.0;
  double b = 0.0;
  double value = 0.0;
  double error = 0.0;
};

Panel make_panel(const std::function<double(double)>& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double whole = gauss_legendre(f, a, b);
  const double halves = gauss_legendre(f, a, mid) + gauss_legendre(f, mid, b);
  double error = std::abs(halves - whole);
  if (!std::isfinite(halves)) throw NumericalError("integrate: non-finite integrand");
  if (b - a <= 1e-15 * std::max({1.0, std::abs(a), std::abs(b)})) error = 0.0;
  return {a, b, halves, error};
}

double log_upper_incomplete_gamma(double a, double x) {
  const double q = boost::math::gamma_q(a, x);
  if (q > 0.0) return log_gamma(a) + std::log(q);
  const double excess = std::max(a - 1.0, 0.0);
  return (a - 1.0) * std::log(x) - x + std::log(x / std::max(x - excess, 1e-300));
}

double safe_pow(double t, double q) {
  if (t == 0.0) return q == 0.0 ? 1.0 : 0.0;
  return std::pow(t, q);
}

// Integral of w over the ray (start, ∞) weighted by t^q, with start ≥ 0.
QuadratureResult tail_integral(const RadialFunction& w, double q, double start, double tol,
                               const std::vector<double>& breaks) {
  auto integrand = [&](double t) { return safe_pow(t, q) * w(t); };
  double lower = start;
  double upper = start + 1.0;
  QuadratureResult acc;
  for (;;) {
    const QuadratureResult piece =
        integrate(integrand, lower, upper, tol, breaks, 0.1 * tol * std::abs(acc.value));
    acc.value += piece.value;
    acc.abs_error_estimate += piece.abs_error_estimate;
    acc.intervals_used += piece.intervals_used;
    const double t0 = std::max(start, 0.5 * upper);
    const double w_hi = w(upper);
    const double w_mid = w(t0);
    double bound = 0.0;
    bool settled = false;
    if (w_hi == 0.0) {
      settled = w_mid > 0.0 || acc.value > 0.0;
    } else {
      double rate = 0.0;
      if (w.tail_rate) {
        rate = *w.tail_rate;
      } else if (w_mid > 0.0 && upper > t0) {
        rate = (std::log(w_mid) - std::log(w_hi)) / (upper - t0);
      }
      if (rate > 0.0) {
        const double log_bound = std::log(w_hi) + rate * upper - (q + 1.0) * std::log(rate) +
                                 log_upper_incomplete_gamma(q + 1.0, rate * upper);
        bound = std::exp(log_bound);
        settled = bound <= 0.1 * tol * std::abs(acc.value) || bound < 1e-300;
      }
    }
    if (settled) {
      acc.abs_error_estimate += bound;
      return acc;
    }
    if (acc.value == 0.0 && w_hi == 0.0 && w_mid == 0.0) {
      double next = kInf;
      for (double b : breaks)
        if (b > upper) next = std::min(next, b);
      if (!std::isfinite(next)) return acc;
      lower = next;
      upper = next + (upper - start);
      continue;
    }
    if (upper > 1e12 * (start + 1.0)) throw NumericalError("radial_moment: non-integrable tail");
    lower = upper;
    upper = start + 2.0 * (upper - start);
  }
}

}  // namespace

RadialFunction RadialFunction::reflected() const {
  RadialFunction out;
  auto inner = evaluator;
  out.evaluator = [inner](double t) { return inner(-t); };
  out.lo = -hi;
  out.hi = -lo;
  for (double b : breakpoints) out.breakpoints.push_back(-b);
  std::sort(out.breakpoints.begin(), out.breakpoints.end());
  out.log_concave = log_concave;
  return out;
}

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b, double rel_tol,
                           std::span<const double> breakpoints, double abs_tol) {
  QuadratureResult result;
  if (!(b > a)) return result;
  if (!std::isfinite(a) || !std::isfinite(b)) throw std::invalid_argument("integrate: interval must be finite");
  std::vector<double> cuts{a};
  for (double x : breakpoints)
    if (x > a && x < b) cuts.push_back(x);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<Panel> panels;
  auto cmp = [&panels](std::size_t i, std::size_t j) { return panels[i].error < panels[j].error; };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(cmp)> queue(cmp);
  double total = 0.0, total_error = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    panels.push_back(make_panel(f, cuts[i], cuts[i + 1]));
    total += panels.back().value;
    total_error += panels.back().error;
    queue.push(panels.size() - 1);
  }
  const double eff_rel = std::max(rel_tol, 4e-15);
  while (total_error > std::max(abs_tol, eff_rel * std::abs(total)) && !queue.empty()) {
    if (static_cast<int>(panels.size()) >= kMaxIntervals) break;
    const std::size_t worst = queue.top();
    if (panels[worst].error == 0.0) break;
    queue.pop();
    const Panel old = panels[worst];
    const double mid = 0.5 * (old.a + old.b);
    panels[worst] = make_panel(f, old.a, mid);
    panels.push_back(make_panel(f, mid, old.b));
    total += panels[worst].value + panels.back().value - old.value;
    total_error += panels[worst].error + panels.back().error - old.error;
    queue.push(worst);
    queue.push(panels.size() - 1);
  }
  std::sort(panels.begin(), panels.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
  for (const Panel& p : panels) {
    result.value += p.value;
    result.abs_error_estimate += p.error;
  }
  result.intervals_used = static_cast<int>(panels.size());
  const double target = std::max(abs_tol, eff_rel * std::abs(result.value));
  // Panels below the resolution floor hold features at the rounding scale of f.
  const double floor_width = 1e-7 * std::max({1.0, std::abs(a), std::abs(b)});
  double resolvable_error = 0.0;
  for (const Panel& p : panels)
    if (p.b - p.a > floor_width) resolvable_error += p.error;
  if (resolvable_error > 1e3 * target && resolvable_error > 1e-300)
    throw NumericalError("integrate: failed to converge");
  return result;
}

QuadratureResult radial_moment(const RadialFunction& w, double q, double tol) {
  if (!(q > -1.0)) throw std::domain_error("radial_moment: divergent integral (q <= -1)");
  const double start = std::max(0.0, w.lo);
  if (!(w.hi > start)) return {};
  std::vector<double> breaks;
  for (double b : w.breakpoints)
    if (b > start && b < w.hi) breaks.push_back(b);
  if (std::isfinite(w.hi)) breaks.push_back(w.hi);

  QuadratureResult acc;
  double from = start;
  if (start == 0.0 && q < 0.0) {
    // t = s^{1/(q+1)} removes the t^q singularity at the origin.
    const double head_end = std::min(1.0, w.hi);
    const double expo = 1.0 / (q + 1.0);
    std::vector<double> mapped;
    for (double b : breaks)
      if (b < head_end) mapped.push_back(std::pow(b, q + 1.0));
    auto g = [&](double s) { return w(std::pow(s, expo)) * expo; };
    acc = integrate(g, 0.0, std::pow(head_end, q + 1.0), tol, mapped);
    from = head_end;
  }
  if (!(w.hi > from)) return acc;
  QuadratureResult rest;
  if (std::isfinite(w.hi)) {
    auto integrand = [&](double t) { return safe_pow(t, q) * w(t); };
    rest = integrate(integrand, from, w.hi, tol, breaks, 0.1 * tol * std::abs(acc.value));
  } else {
    rest = tail_integral(w, q, from, tol, breaks);
  }
  acc.value += rest.value;
  acc.abs_error_estimate += rest.abs_error_estimate;
  acc.intervals_used += rest.intervals_used;
  return acc;
}

double kq_radius_1d(const RadialFunction& w, double q, int direction_sign) {
  if (q < 1.0) throw std::invalid_argument("kq_radius_1d: q must be at least 1");
  if (direction_sign != 1 && direction_sign != -1) throw std::invalid_argument("kq_radius_1d: sign must be ±1");
  if (!(w(0.0) > 0.0)) throw std::domain_error("kq_radius_1d: w(0) must be positive");
  const RadialFunction ray = direction_sign > 0 ? w : w.reflected();
  const double moment = radial_moment(ray, q - 1.0, 1e-13).value;
  return std::pow(q * moment, 1.0 / q);
}

ConcavityReport concavity_check(const RadialFunction& w, ConcavityMode mode, std::span<const double> q_grid,
                                double tol) {
  if (q_grid.size() < 3) throw std::invalid_argument("concavity_check: need at least 3 grid points");
  for (std::size_t i = 1; i < q_grid.size(); ++i)
    if (!(q_grid[i] > q_grid[i - 1])) throw std::invalid_argument("concavity_check: grid must increase");
  ConcavityReport report;
  report.q_grid.assign(q_grid.begin(), q_grid.end());
  for (double q : q_grid) {
    const QuadratureResult m = radial_moment(w, q, 1e-14);
    if (!(m.value > 0.0)) throw NumericalError("concavity_check: vanishing moment");
    const double normalizer = mode == ConcavityMode::borell ? log_gamma(q + 1.0) : (q > 0.0 ? q * std::log(q) : 0.0);
    report.phi.push_back(std::log(m.value) - normalizer);
  }
  report.max_second_difference = -kInf;
  for (std::size_t i = 1; i + 1 < q_grid.size(); ++i) {
    const double hm = q_grid[i] - q_grid[i - 1];
    const double hp = q_grid[i + 1] - q_grid[i];
    const double slope_m = (report.phi[i] - report.phi[i - 1]) / hm;
    const double slope_p = (report.phi[i + 1] - report.phi[i]) / hp;
    const double d2 = (slope_p - slope_m) * 0.5 * (hm + hp);
    report.second_differences.push_back(d2);
    report.max_second_difference = std::max(report.max_second_difference, d2);
  }
  report.holds = report.max_second_difference <= tol;
  return report;
}

GrunbaumReport grunbaum_mass(const RadialFunction& w) {
  const RadialFunction left = w.reflected();
  const auto m0p = radial_moment(w, 0.0, 1e-13);
  const auto m0n = radial_moment(left, 0.0, 1e-13);
  const auto m1p = radial_moment(w, 1.0, 1e-13);
  const auto m1n = radial_moment(left, 1.0, 1e-13);
  GrunbaumReport report;
  report.mass = m0p.value + m0n.value;
  if (!(report.mass > 0.0)) throw std::invalid_argument("grunbaum_mass: zero mass");
  report.barycenter = (m1p.value - m1n.value) / report.mass;
  const double spread = (m1p.value + m1n.value) / report.mass;
  if (std::abs(report.barycenter) > 1e-8 * std::max(1.0, spread))
    throw std::invalid_argument("grunbaum_mass: barycenter not at origin");
  report.positive_mass = m0p.value / report.mass;
  report.error = (m0p.abs_error_estimate + m0n.abs_error_estimate) / report.mass;
  const double slack = report.error + 1e-12;
  report.within_bounds = report.positive_mass >= std::exp(-1.0) - slack &&
                         report.positive_mass <= 1.0 - std::exp(-1.0) + slack;
  return report;
}

double golden_section_argmax(const std::function<double(double)>& f, double a, double b, double bracket) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > bracket * std::max(1.0, std::abs(a) + std::abs(b))) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

DensityZeroReport density_zero_bound(const RadialFunction& w, double eps) {
  const RadialFunction left = w.reflected();
  const double mp = radial_moment(w, 0.0, 1e-13).value;
  const double mn = radial_moment(left, 0.0, 1e-13).value;
  const double mass = mp + mn;
  if (!(mass > 0.0)) throw std::invalid_argument("density_zero_bound: zero mass");
  DensityZeroReport report;
  report.positive_mass = mp / mass;
  if (report.positive_mass < eps - 1e-9 || report.positive_mass > 1.0 - eps + 1e-9)
    throw std::invalid_argument("density_zero_bound: mass condition fails");
  auto expand = [&](double direction, double finite_end) {
    if (std::isfinite(finite_end)) return finite_end;
    double x = direction;
    while (std::abs(x) < 1e8 && w(x) >= w(0.5 * x)) x *= 2.0;
    return x;
  };
  const double a = expand(-1.0, w.lo);
  const double b = expand(1.0, w.hi);
  const double x = golden_section_argmax([&](double t) { return w(t); }, a, b);
  report.argmax = x;
  report.sup = w(x);
  for (double candidate : {a, b, 0.0}) {
    if (w(candidate) > report.sup) {
      report.sup = w(candidate);
      report.argmax = candidate;
    }
  }
  report.ratio = w(0.0) / report.sup;
  report.holds = report.ratio >= eps - 1e-9;
  return report;
}

RadialFunction marginal_1d(const distributions::DensitySpec& spec, const Eigen::VectorXd& theta) {
  using distributions::Family;
  const int n = spec.dim();
  if (theta.size() != n) throw std::invalid_argument("marginal_1d: dimension mismatch");
  if (std::abs(theta.norm() - 1.0) > 1e-9) throw std::invalid_argument("marginal_1d: direction must be a unit vector");
  const double sigma = spec.scale();
  RadialFunction out;
  out.log_concave = true;

  if (spec.family() == Family::gaussian) {
    out.evaluator = [sigma](double t) {
      const double u = t / sigma;
      return std::exp(-0.5 * u * u) / (sigma * std::sqrt(2.0 * std::numbers::pi));
    };
    return out;
  }
  if (spec.family() == Family::uniform_ball) {
    const double radius = std::sqrt(n + 2.0) * sigma;
    const double c = std::exp(log_gamma(0.5 * n + 1.0) - 0.5 * std::log(std::numbers::pi) - log_gamma(0.5 * (n + 1.0))) /
                     radius;
    const double power = 0.5 * (n - 1.0);
    out.evaluator = [c, radius, power](double t) {
      const double u = 1.0 - (t / radius) * (t / radius);
      return u <= 0.0 ? (power == 0.0 && u == 0.0 ? c : 0.0) : c * std::pow(u, power);
    };
    out.lo = -radius;
    out.hi = radius;
    return out;
  }
  if (spec.family() == Family::uniform_simplex) {
    Eigen::Index best = 0;
    const Eigen::VectorXd bary = distributions::simplex_helmert_transpose(theta);
    bary.cwiseAbs().maxCoeff(&best);
    const Eigen::VectorXd vertex = distributions::simplex_vertex_direction(n, static_cast<int>(best));
    double sign = 0.0;
    if ((theta - vertex).norm() < 1e-9) sign = 1.0;
    if ((theta + vertex).norm() < 1e-9) sign = -1.0;
    if (sign == 0.0) throw std::invalid_argument("marginal_1d: simplex marginal needs a vertex direction");
    const double v = std::sqrt(n * (n + 2.0)) * sigma;
    const double log_c = std::log(static_cast<double>(n)) - n * std::log(v * (1.0 + 1.0 / n));
    auto density = [v, n, log_c](double t) {
      if (t > v || t < -v / n) return 0.0;
      return n == 1 ? std::exp(log_c) : std::exp(log_c + (n - 1.0) * std::log(v - t));
    };
    if (sign > 0.0) {
      out.evaluator = density;
      out.lo = -v / n;
      out.hi = v;
    } else {
      out.evaluator = [density](double t) { return density(-t); };
      out.lo = -v;
      out.hi = v / n;
    }
    return out;
  }

  // Product families.
  const auto support = spec.coordinate_support();
  auto coord = [spec, sigma](double t) { return std::exp(spec.coordinate_log_density(t / sigma)) / sigma; };
  const double lo1 = support.first * sigma;
  const double hi1 = support.second * sigma;
  std::vector<double> kinks;
  if (spec.family() == Family::product_laplace) kinks.push_back(0.0);

  Eigen::Index axis = 0;
  theta.cwiseAbs().maxCoeff(&axis);
  const double off_axis = theta.squaredNorm() - theta(axis) * theta(axis);
  if (off_axis <= 1e-24) {
    const double sign = theta(axis) > 0.0 ? 1.0 : -1.0;
    out.evaluator = [coord, sign](double t) { return coord(sign * t); };
    out.lo = sign > 0.0 ? lo1 : -hi1;
    out.hi = sign > 0.0 ? hi1 : -lo1;
    out.breakpoints = kinks;
    return out;
  }
  if (n != 2) throw std::invalid_argument("marginal_1d: no exact path for this family and direction");

  const double c = theta(0);
  const double s = theta(1);
  auto range = [](double coef, double lo, double hi) {
    return coef > 0.0 ? std::pair{coef * lo, coef * hi} : std::pair{coef * hi, coef * lo};
  };
  const auto r1 = range(c, lo1, hi1);
  const auto r2 = range(s, lo1, hi1);
  out.lo = r1.first + r2.first;
  out.hi = r1.second + r2.second;
  out.breakpoints.push_back(0.0);
  for (double a : {lo1, hi1})
    for (double b : {lo1, hi1})
      if (std::isfinite(a) && std::isfinite(b)) out.breakpoints.push_back(c * a + s * b);
  std::sort(out.breakpoints.begin(), out.breakpoints.end());
  out.evaluator = [=](double t) {
    // Density of c·X1 + s·X2 at t: ∫ f(x) f((t − c x)/s)/|s| dx.
    double xl = lo1, xh = hi1;
    const double a1 = (t - s * hi1) / c;
    const double a2 = (t - s * lo1) / c;
    const double cut_lo = std::isnan(a1) ? -kInf : std::min(a1, a2);
    const double cut_hi = std::isnan(a2) ? kInf : std::max(a1, a2);
    xl = std::max(xl, cut_lo);
    xh = std::min(xh, cut_hi);
    if (!(xh > xl)) return 0.0;
    RadialFunction g;
    g.evaluator = [&](double x) { return coord(x) * coord((t - c * x) / s) / std::abs(s); };
    g.lo = xl;
    g.hi = xh;
    g.log_concave = true;
    for (double k : kinks) {
      g.breakpoints.push_back(k);
      g.breakpoints.push_back((t - s * k) / c);
    }
    std::sort(g.breakpoints.begin(), g.breakpoints.end());
    return radial_moment(g, 0.0, 1e-12).value + radial_moment(g.reflected(), 0.0, 1e-12).value;
  };
  return out;
}

RadialFunction marginal_1d(const distributions::SampleBatch& batch, const Eigen::VectorXd& theta) {
  if (theta.size() != batch.dim()) throw std::invalid_argument("marginal_1d: dimension mismatch");
  if (batch.size() < 2) throw std::invalid_argument("marginal_1d: need at least two samples");
  const Eigen::VectorXd proj = batch.values * theta;
  auto values = std::make_shared<std::vector<double>>(proj.data(), proj.data() + proj.size());
  const double sd = std::sqrt(variance(*values));
  const double iqr = quantile(*values, 0.75) - quantile(*values, 0.25);
  double spread = std::min(sd, iqr / 1.34);
  if (!(spread > 0.0)) spread = sd;
  const double h = 0.9 * spread * std::pow(static_cast<double>(values->size()), -0.2);
  if (!(h > 0.0)) throw std::invalid_argument("marginal_1d: degenerate projections");
  RadialFunction out;
  out.log_concave = false;
  const double norm = 1.0 / (static_cast<double>(values->size()) * h * std::sqrt(2.0 * std::numbers::pi));
  out.evaluator = [values, h, norm](double t) {
    double acc = 0.0;
    for (double x : *values) {
      const double u = (t - x) / h;
      acc += std::exp(-0.5 * u * u);
    }
    return acc * norm;
  };
  return out;
}

}  // namespace thinshell::radial
