#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "thinshell/bodies.hpp"
#include "thinshell/radial1d.hpp"
#include "thinshell/special.hpp"

namespace thinshell::bodies {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct RelationName {
  RelationId id;
  std::string_view name;
};

constexpr std::array<RelationName, 11> kRelationNames{{
    {RelationId::zq_chain, "zq-chain"},
    {RelationId::zqplus_chain, "zqplus-chain"},
    {RelationId::kq_chain, "kq-chain"},
    {RelationId::zk_identity, "zk-identity"},
    {RelationId::sandwich, "sandwich"},
    {RelationId::add_g, "addG"},
    {RelationId::cor_dist, "cor-dist"},
    {RelationId::thm_dist, "thm-dist"},
    {RelationId::z2plus, "z2plus"},
    {RelationId::marginal_a1, "marginal-A1"},
    {RelationId::halfspace_a3, "halfspace-A3"},
}};

// Running min/max of a per-direction ratio with its standard error.
struct RatioTracker {
  double c1 = kInf, c1_se = 0.0, c2 = -kInf, c2_se = 0.0;
  void add(double r, double se) {
    if (r < c1) {
      c1 = r;
      c1_se = se;
    }
    if (r > c2) {
      c2 = r;
      c2_se = se;
    }
  }
  void fill(InclusionReport& report) const {
    report.c1 = c1;
    report.c1_radius = 3.0 * c1_se;
    report.c2 = c2;
    report.c2_radius = 3.0 * c2_se;
  }
};

double ratio_se(const Evaluation& a, const Evaluation& b) {
  return (a.value / b.value) * std::hypot(a.std_error / a.value, b.std_error / b.value);
}

const DensityEvaluator& need_density(const RelationInstance& inst, RelationId id) {
  if (!inst.density) throw UnsupportedRelation(std::string(to_string(id)) + ": instance needs a density evaluator");
  return *inst.density;
}

const distributions::SampleBatch& need_batch(const RelationInstance& inst, RelationId id) {
  if (!inst.batch) throw UnsupportedRelation(std::string(to_string(id)) + ": instance needs a sample batch");
  return *inst.batch;
}

void require_dim_at_most(int m, int limit, RelationId id) {
  if (m > limit) {
    std::ostringstream os;
    os << to_string(id) << ": quadrature path supports m ≤ " << limit;
    throw UnsupportedRelation(os.str());
  }
}

// Either Monte Carlo from a batch or quadrature from a density (m ≤ 2).
Evaluation support_of(const RelationInstance& inst, RelationId id, double q, const Eigen::VectorXd& theta,
                      bool one_sided) {
  if (inst.batch) return one_sided ? zq_plus_support(*inst.batch, q, theta) : zq_support(*inst.batch, q, theta);
  const DensityEvaluator& w = need_density(inst, id);
  require_dim_at_most(w.dim, 2, id);
  return one_sided ? zq_plus_support(w, q, theta) : zq_support(w, q, theta);
}

int instance_dim(const RelationInstance& inst) {
  if (inst.batch) return inst.batch->dim();
  if (inst.density) return inst.density->dim;
  if (inst.body) return inst.body->dim;
  throw UnsupportedRelation("relation instance is empty");
}

double origin_value(const DensityEvaluator& w) { return w.value(Eigen::VectorXd::Zero(w.dim)); }

InclusionReport chain(RelationId id, const RelationInstance& inst, const RelationParams& p, const DirectionSet& dirs) {
  if (!(p.q1 >= 1.0 && p.q2 >= p.q1)) throw std::invalid_argument("chain relations need 1 ≤ q1 ≤ q2");
  const bool one_sided = id == RelationId::zqplus_chain;
  InclusionReport report;
  RatioTracker tracker;
  for (const auto& theta : dirs.directions) {
    const Evaluation hi = support_of(inst, id, p.q2, theta, one_sided);
    const Evaluation lo = support_of(inst, id, p.q1, theta, one_sided);
    tracker.add(hi.value / lo.value, ratio_se(hi, lo));
  }
  tracker.fill(report);
  const double gap = 1.0 / p.q1 - 1.0 / p.q2;
  if (one_sided) {
    const double floor = std::pow(2.0 / std::numbers::e, gap);
    report.constant_free_claim = "min ratio >= (2/e)^(1/q1-1/q2)";
    report.constant_free_holds = report.c1 >= floor - report.c1_radius - 1e-12;
    report.fitted_constant = report.c2 / (std::pow((2.0 * std::numbers::e - 2.0) / std::numbers::e, gap) * p.q2 / p.q1);
  } else {
    report.constant_free_claim = "min ratio >= 1";
    report.constant_free_holds = report.c1 >= 1.0 - report.c1_radius - 1e-12;
    report.fitted_constant = report.c2 / (p.q2 / p.q1);
  }
  report.fitted_label = "C";
  report.verdict = *report.constant_free_holds;
  return report;
}

InclusionReport kq_chain(const RelationInstance& inst, const RelationParams& p, const DirectionSet& dirs) {
  if (!(p.q1 >= 1.0 && p.q2 >= p.q1)) throw std::invalid_argument("kq-chain needs 1 ≤ q1 ≤ q2");
  const DensityEvaluator& w = need_density(inst, RelationId::kq_chain);
  const double w0 = origin_value(w);
  const int m = w.dim;
  const StarBodyOracle k1 = kq_body(w, p.q1);
  const StarBodyOracle k2 = kq_body(w, p.q2);
  RatioTracker tracker;
  const double norm = std::pow(w0, 1.0 / p.q1 - 1.0 / p.q2);
  for (const auto& theta : dirs.directions) tracker.add(k2.radial(theta).value / k1.radial(theta).value * norm, 0.0);
  InclusionReport report;
  tracker.fill(report);
  const double lower = std::exp(-m * (1.0 / p.q1 - 1.0 / p.q2));
  const double upper = std::exp(log_gamma(p.q2 + 1.0) / p.q2 - log_gamma(p.q1 + 1.0) / p.q1);
  report.constant_free_claim = "e^{-m(1/q1-1/q2)} <= ratio <= Gamma(q2+1)^{1/q2}/Gamma(q1+1)^{1/q1}";
  report.constant_free_holds = report.c1 >= lower * (1.0 - 1e-9) && report.c2 <= upper * (1.0 + 1e-9);
  report.verdict = *report.constant_free_holds;
  return report;
}

InclusionReport zk_identity(const RelationInstance& inst, const RelationParams& p, const DirectionSet& dirs) {
  const DensityEvaluator& w = need_density(inst, RelationId::zk_identity);
  require_dim_at_most(w.dim, 2, RelationId::zk_identity);
  const double q = p.q1;
  const StarBodyOracle body = kq_body(w, w.dim + q);
  RatioTracker tracker;
  for (const auto& theta : dirs.directions) {
    const double polar = zq_plus_support(body, q, theta).value;
    const double cartesian = zq_plus_support(w, q, theta).value;
    tracker.add(polar / cartesian, 0.0);
  }
  InclusionReport report;
  tracker.fill(report);
  report.constant_free_claim = "|ratio - 1| <= 1e-8";
  report.constant_free_holds = std::abs(report.c1 - 1.0) <= 1e-8 && std::abs(report.c2 - 1.0) <= 1e-8;
  report.verdict = *report.constant_free_holds;
  return report;
}

InclusionReport sandwich(const RelationInstance& inst, const RelationParams& p, const DirectionSet& dirs) {
  const DensityEvaluator& w = need_density(inst, RelationId::sandwich);
  require_dim_at_most(w.dim, 2, RelationId::sandwich);
  const int m = w.dim;
  const double q = p.q1;
  const StarBodyOracle body = kq_body(w, m + q);
  const double vol_root = std::pow(volume(body), 1.0 / q);
  RatioTracker tracker;
  for (const auto& theta : dirs.directions) {
    const double hk = support_from_radial(body, theta);
    const double hz = zq_plus_support(body, q, theta).value;
    tracker.add(vol_root * hk / hz, 0.0);
  }
  InclusionReport report;
  tracker.fill(report);
  const double gamma_factor = std::exp((log_gamma(m + q + 1.0) - log_gamma(m) - log_gamma(q + 1.0)) / q);
  report.fitted_constant = (report.c2 / gamma_factor) / report.c1;
  report.fitted_label = "C2/C1";
  report.secondary_constant = report.c2 / gamma_factor;
  report.secondary_label = "C2";
  report.verdict = std::isfinite(*report.fitted_constant);
  return report;
}

InclusionReport add_g(RelationId id, const RelationInstance& inst, const RelationParams& p, const DirectionSet& dirs) {
  const distributions::SampleBatch& x = need_batch(inst, id);
  const double q = p.q1;
  if (q < 2.0) throw std::invalid_argument("addG relations need q ≥ 2");
  const distributions::LinearMap map = inst.map ? *inst.map : distributions::LinearMap::identity(x.dim());
  const distributions::PsiAlphaProfile profile =
      inst.profile ? *inst.profile : distributions::PsiAlphaProfile{1.0, 1.0, distributions::PsiAlphaProfile::Provenance::estimated};
  const distributions::SampleBatch y = distributions::convolve_gaussian(x, map);
  RatioTracker tracker;
  const double floor = std::exp(-1.0 / q + log_gaussian_norm_moment(1, q) / q) / std::numbers::sqrt2;
  bool floor_holds = true;
  for (const auto& theta : dirs.directions) {
    const Evaluation h = zq_plus_support(y, q, theta);
    tracker.add(h.value, h.std_error);
    if (h.value < floor - 3.0 * h.std_error) floor_holds = false;
  }
  InclusionReport report;
  tracker.fill(report);
  const double op = map.op_norm();
  const double b = profile.b_alpha;
  const double alpha = profile.alpha;
  if (id == RelationId::add_g) {
    report.constant_free_claim = "h >= e^{-1/q} (E|G_1|^q)^{1/q} / sqrt(2)";
    report.constant_free_holds = floor_holds;
    report.fitted_constant = report.c1 / std::sqrt(q);
    report.fitted_label = "c";
    report.secondary_constant = report.c2 / (op * b * std::pow(q, 1.0 / alpha) + std::sqrt(q));
    report.secondary_label = "C";
    report.verdict = floor_holds;
  } else {
    const double dist = report.c2 / report.c1;
    report.fitted_constant = dist / (1.0 + op * b * std::pow(q, 1.0 / alpha - 0.5));
    report.fitted_label = "C1";
    report.secondary_constant = dist;
    report.secondary_label = "dist";
    report.verdict = std::isfinite(dist);
  }
  return report;
}

InclusionReport thm_dist(const RelationInstance& inst, const RelationParams& p, const DirectionSet& dirs) {
  const DensityEvaluator& w = need_density(inst, RelationId::thm_dist);
  require_dim_at_most(w.dim, 2, RelationId::thm_dist);
  const int m = w.dim;
  const double pp = p.q1;
  if (pp < 1.0 - m) throw std::invalid_argument("thm-dist needs p ≥ -m+1");
  const StarBodyOracle body = kq_body(w, m + pp);
  const double qz = std::max(pp, static_cast<double>(m));
  RatioTracker rho;
  double zmin = kInf, zmax = 0.0;
  for (const auto& theta : dirs.directions) {
    rho.add(body.radial(theta).value, 0.0);
    const double h = zq_plus_support(w, qz, theta).value;
    zmin = std::min(zmin, h);
    zmax = std::max(zmax, h);
  }
  InclusionReport report;
  rho.fill(report);
  const double dist_k = report.c2 / report.c1;
  const double dist_z = zmax / zmin;
  report.fitted_constant = dist_k / (std::max(m / (m + pp), 1.0) * dist_z);
  report.fitted_label = "C";
  report.secondary_constant = dist_k;
  report.secondary_label = "dist(K,B)";
  report.verdict = std::isfinite(*report.fitted_constant);
  return report;
}

InclusionReport z2plus(const RelationInstance& inst, const DirectionSet& dirs) {
  RatioTracker tracker;
  for (const auto& theta : dirs.directions) {
    const Evaluation h = support_of(inst, RelationId::z2plus, 2.0, theta, true);
    tracker.add(h.value, h.std_error);
  }
  InclusionReport report;
  tracker.fill(report);
  const double e = std::numbers::e;
  const double c = 1.0 / std::sqrt(3.0 * e * e * (1.0 + std::pow(e - 1.0, 3)));
  report.constant_free_claim = "c B subset Z2+ subset sqrt(2) B with c = (3e^2(1+(e-1)^3))^{-1/2}";
  report.constant_free_holds = report.c1 >= c - report.c1_radius - 1e-12 &&
                               report.c2 <= std::numbers::sqrt2 + report.c2_radius + 1e-12;
  report.fitted_constant = report.c1;
  report.fitted_label = "c";
  report.verdict = *report.constant_free_holds;
  return report;
}

InclusionReport marginal_a1(const RelationInstance& inst, const RelationParams& p, const DirectionSet& dirs) {
  const double q = p.q1;
  StarBodyOracle body;
  if (inst.body) {
    body = *inst.body;
  } else {
    const DensityEvaluator& w = need_density(inst, RelationId::marginal_a1);
    body = kq_body(w, w.dim + q);
  }
  const int m = body.dim;
  require_dim_at_most(m, 2, RelationId::marginal_a1);
  const double gamma_root = std::exp((log_gamma(m) + log_gamma(q + 1.0) - log_gamma(m + q + 1.0)) / q);
  RatioTracker tracker;
  bool lower_holds = true;
  double worst_lower_margin = kInf;
  for (const auto& theta : dirs.directions) {
    const double hk = support_from_radial(body, theta);
    const double hz = zq_plus_support(body, q, theta).value;
    const double half = halfspace_volume(body, theta);
    const double ratio = hz / std::pow(2.0 * half, 1.0 / q) / hk;
    tracker.add(ratio, 0.0);
    double flatness = 1.0;
    if (m == 2) {
      const double top = support_from_radial(body, theta);
      const double bottom = -support_from_radial(body, -theta);
      auto chord = [&](double t) { return chord_length(body, theta, t); };
      const double t_star = radial::golden_section_argmax(chord, bottom, top, 1e-10);
      const double peak = std::max(chord(t_star), chord(0.0));
      flatness = chord(0.0) / peak;
    }
    const double lower = std::pow(flatness, 1.0 / q) * gamma_root;
    worst_lower_margin = std::min(worst_lower_margin, ratio - lower);
    if (ratio < lower * (1.0 - 1e-8)) lower_holds = false;
  }
  InclusionReport report;
  tracker.fill(report);
  report.constant_free_claim = "(f(0)/|f|_inf)^{1/q} (G(m)G(q+1)/G(m+q+1))^{1/q} <= ratio <= 1";
  report.constant_free_holds = lower_holds && report.c2 <= 1.0 + 1e-8;
  report.fitted_constant = worst_lower_margin;
  report.fitted_label = "min lower margin";
  report.verdict = *report.constant_free_holds;
  return report;
}

InclusionReport halfspace_a3(const RelationInstance& inst, const RelationParams& p, const DirectionSet& dirs) {
  const DensityEvaluator& raw = need_density(inst, RelationId::halfspace_a3);
  require_dim_at_most(raw.dim, 3, RelationId::halfspace_a3);
  const int m = raw.dim;
  const double q = p.q1;
  const double w0 = origin_value(raw);
  if (!(w0 > 0.0)) throw std::domain_error("halfspace-A3: w(0) must be positive");
  const DensityEvaluator w = raw.scaled_values(1.0 / w0);
  const StarBodyOracle km = kq_body(w, m);
  const StarBodyOracle kmq = kq_body(w, m + q);
  const double vol_m = volume(km);
  const double vol_mq = volume(kmq);
  RatioTracker tracker;
  bool grunbaum_holds = true;
  bool ratio_holds = true;
  for (const auto& theta : dirs.directions) {
    const double half_m = halfspace_volume(km, theta);
    const double half_mq = halfspace_volume(kmq, theta);
    tracker.add(std::pow(half_mq / vol_mq, 1.0 / q), 0.0);
    if (half_m / vol_m < std::exp(-1.0) * (1.0 - 1e-8)) grunbaum_holds = false;
    if (half_mq / half_m < std::exp(-q) * (1.0 - 1e-8)) ratio_holds = false;
  }
  InclusionReport report;
  tracker.fill(report);
  report.constant_free_claim = "vol(K_m∩H+)/vol(K_m) >= 1/e and vol(K_{m+q}∩H+)/vol(K_m∩H+) >= e^{-q}";
  report.constant_free_holds = grunbaum_holds && ratio_holds;
  report.fitted_constant = report.c1;
  report.fitted_label = "c";
  report.verdict = *report.constant_free_holds;
  return report;
}

}  // namespace

std::string_view to_string(RelationId id) {
  for (const auto& entry : kRelationNames)
    if (entry.id == id) return entry.name;
  throw std::invalid_argument("unknown relation");
}

RelationId relation_from_string(std::string_view name) {
  for (const auto& entry : kRelationNames)
    if (entry.name == name) return entry.id;
  throw std::invalid_argument("unknown relation: " + std::string(name));
}

const std::vector<RelationId>& all_relations() {
  static const std::vector<RelationId> ids = [] {
    std::vector<RelationId> out;
    for (const auto& entry : kRelationNames) out.push_back(entry.id);
    return out;
  }();
  return ids;
}

InclusionReport verify_relation(RelationId id, const RelationInstance& instance, const RelationParams& params,
                                const DirectionSet& directions) {
  if (directions.directions.empty()) throw std::invalid_argument("verify_relation: empty direction set");
  const int m = instance_dim(instance);
  for (const auto& theta : directions.directions)
    if (theta.size() != m) throw std::invalid_argument("verify_relation: direction dimension mismatch");
  InclusionReport report;
  switch (id) {
    case RelationId::zq_chain:
    case RelationId::zqplus_chain:
      report = chain(id, instance, params, directions);
      break;
    case RelationId::kq_chain:
      report = kq_chain(instance, params, directions);
      break;
    case RelationId::zk_identity:
      report = zk_identity(instance, params, directions);
      break;
    case RelationId::sandwich:
      report = sandwich(instance, params, directions);
      break;
    case RelationId::add_g:
    case RelationId::cor_dist:
      report = add_g(id, instance, params, directions);
      break;
    case RelationId::thm_dist:
      report = thm_dist(instance, params, directions);
      break;
    case RelationId::z2plus:
      report = z2plus(instance, directions);
      break;
    case RelationId::marginal_a1:
      report = marginal_a1(instance, params, directions);
      break;
    case RelationId::halfspace_a3:
      report = halfspace_a3(instance, params, directions);
      break;
  }
  report.relation_id = std::string(to_string(id));
  report.instance = instance.descriptor;
  report.q1 = params.q1;
  report.q2 = params.q2;
  report.direction_count = directions.size();
  return report;
}

}  // namespace thinshell::bodies
