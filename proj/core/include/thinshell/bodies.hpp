#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "thinshell/distributions.hpp"

namespace thinshell::bodies {

struct Evaluation {
  double value = 0.0;
  double std_error = 0.0;
};

using DirectionalEvaluator = std::function<Evaluation(const Eigen::VectorXd&)>;

// A body star-shaped about the origin, known through its radial function
// and/or its support function on unit vectors.
struct StarBodyOracle {
  int dim = 0;
  DirectionalEvaluator radial;
  DirectionalEvaluator support;
  bool origin_interior = true;
  std::string descriptor;

  bool has_radial() const { return static_cast<bool>(radial); }
  bool has_support() const { return static_cast<bool>(support); }

  // Homogeneous extensions to arbitrary non-zero vectors.
  Evaluation rho(const Eigen::VectorXd& x) const;
  Evaluation h(const Eigen::VectorXd& x) const;
  // ‖x‖_K = |x| / ρ(x/|x|).
  Evaluation gauge(const Eigen::VectorXd& x) const;

  StarBodyOracle scaled(double factor) const;

  static StarBodyOracle ball(int m, double radius = 1.0);
  static StarBodyOracle ellipsoid(const Eigen::VectorXd& semiaxes);
};

// Density (not necessarily normalized) on R^m for quadrature paths.
struct DensityEvaluator {
  int dim = 0;
  std::function<double(const Eigen::VectorXd&)> value;
  // Optional: non-smooth points t > 0 along origin + t·dir.
  std::function<std::vector<double>(const Eigen::VectorXd&, const Eigen::VectorXd&)> breakpoints;
  std::string descriptor;

  static DensityEvaluator from_spec(const distributions::DensitySpec& spec);
  DensityEvaluator scaled_values(double factor) const;
};

struct DirectionSet {
  enum class Generation { sampled, antipodal_sampled, axis_and_diagonals, planar_grid };
  std::vector<Eigen::VectorXd> directions;
  Generation generation = Generation::sampled;
  std::uint64_t seed = 0;

  std::size_t size() const { return directions.size(); }

  static DirectionSet sampled(int m, int count, std::uint64_t seed);
  static DirectionSet antipodal_sampled(int m, int pairs, std::uint64_t seed);
  static DirectionSet axis_and_diagonals(int m);
  // Equally spaced angles on S^1, starting at angle 0.
  static DirectionSet planar_grid(int count);
};

// Default direction set: 64·m directions, antipodal pairs plus the axes.
DirectionSet default_directions(int m, std::uint64_t seed);

// Z_q^+ support: Monte Carlo from a batch.
Evaluation zq_plus_support(const distributions::SampleBatch& batch, double q, const Eigen::VectorXd& theta);
// Quadrature along the exact one-dimensional marginal.
Evaluation zq_plus_support(const distributions::DensitySpec& spec, double q, const Eigen::VectorXd& theta);
// Quadrature of the marginal of w (m ≤ 2).
Evaluation zq_plus_support(const DensityEvaluator& w, double q, const Eigen::VectorXd& theta);
// Z_q^+ of the uniform measure on K, by polar integration (m ≤ 3).
Evaluation zq_plus_support(const StarBodyOracle& body, double q, const Eigen::VectorXd& theta);

Evaluation zq_support(const distributions::SampleBatch& batch, double q, const Eigen::VectorXd& theta);
Evaluation zq_support(const distributions::DensitySpec& spec, double q, const Eigen::VectorXd& theta);
Evaluation zq_support(const DensityEvaluator& w, double q, const Eigen::VectorXd& theta);

StarBodyOracle zq_plus_body(const distributions::SampleBatch& batch, double q);
StarBodyOracle zq_plus_body(const DensityEvaluator& w, double q);
StarBodyOracle zq_body(const distributions::SampleBatch& batch, double q);
StarBodyOracle zq_body(const DensityEvaluator& w, double q);

// Ball's body: ρ(θ) = (q ∫_0^∞ t^{q-1} w(tθ) dt)^{1/q}.
StarBodyOracle kq_body(const DensityEvaluator& w, double q);

struct TriangleReport {
  double worst_slack = 0.0;
  double max_violation = 0.0;
  int violations = 0;
  int pairs = 0;
  bool holds = true;
};

TriangleReport triangle_inequality_check(const StarBodyOracle& oracle, int pair_count, std::uint64_t seed);

struct DistanceEstimate {
  double ratio = 0.0;
  double min_value = 0.0;
  double max_value = 0.0;
  std::size_t direction_count = 0;
  bool lower_bound_estimate = true;
};

DistanceEstimate dist_to_ball(const StarBodyOracle& oracle, const DirectionSet& directions);

struct InclusionReport {
  std::string relation_id;
  std::string instance;
  double q1 = 0.0;
  double q2 = 0.0;
  double c1 = 0.0;
  double c1_radius = 0.0;
  double c2 = 0.0;
  double c2_radius = 0.0;
  bool verdict = false;
  std::string constant_free_claim;
  std::optional<bool> constant_free_holds;
  std::optional<double> fitted_constant;
  std::string fitted_label;
  std::optional<double> secondary_constant;
  std::string secondary_label;
  std::size_t direction_count = 0;
};

struct Window {
  double lo = 0.0;
  double hi = 0.0;
};

InclusionReport inclusion_constants(const StarBodyOracle& K, const StarBodyOracle& L, const DirectionSet& directions,
                                    std::optional<Window> window = std::nullopt);

// Volumes by polar integration (m ≤ 3 deterministic, otherwise Monte Carlo).
double volume(const StarBodyOracle& oracle);
double halfspace_volume(const StarBodyOracle& oracle, const Eigen::VectorXd& theta);
double halfspace_fraction(const StarBodyOracle& oracle, const Eigen::VectorXd& theta);
// sup_ξ ρ(ξ)⟨ξ, θ⟩ for a convex body given by its radial function (m ≤ 2).
double support_from_radial(const StarBodyOracle& oracle, const Eigen::VectorXd& theta);
// Length of the chord {x ∈ K : ⟨x,θ⟩ = t} for a convex body in the plane.
double chord_length(const StarBodyOracle& oracle, const Eigen::VectorXd& theta, double t);

enum class RelationId {
  zq_chain,
  zqplus_chain,
  kq_chain,
  zk_identity,
  sandwich,
  add_g,
  cor_dist,
  thm_dist,
  z2plus,
  marginal_a1,
  halfspace_a3,
};

std::string_view to_string(RelationId id);
RelationId relation_from_string(std::string_view name);
const std::vector<RelationId>& all_relations();

struct RelationInstance {
  std::string descriptor;
  std::optional<DensityEvaluator> density;
  std::optional<distributions::SampleBatch> batch;
  std::optional<StarBodyOracle> body;
  std::optional<distributions::LinearMap> map;
  std::optional<distributions::PsiAlphaProfile> profile;
};

struct RelationParams {
  double q1 = 1.0;
  double q2 = 1.0;
};

class UnsupportedRelation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

InclusionReport verify_relation(RelationId id, const RelationInstance& instance, const RelationParams& params,
                                const DirectionSet& directions);

}  // namespace thinshell::bodies
