#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "thinshell/distributions.hpp"

namespace thinshell::radial {

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-negative function on the real line, zero outside [lo, hi].
struct RadialFunction {
  std::function<double(double)> evaluator;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  std::vector<double> breakpoints;
  bool log_concave = false;
  std::optional<double> tail_rate;

  double operator()(double t) const { return (t < lo || t > hi) ? 0.0 : evaluator(t); }
  RadialFunction reflected() const;
};

struct QuadratureResult {
  double value = 0.0;
  double abs_error_estimate = 0.0;
  int intervals_used = 0;
};

// Globally adaptive Gauss–Legendre on a finite interval. Each interval is
// scored by the gap between its one-panel and two-panel rules.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b, double rel_tol,
                           std::span<const double> breakpoints = {}, double abs_tol = 0.0);

// ∫_0^∞ t^q w(t) dt for q > -1.
QuadratureResult radial_moment(const RadialFunction& w, double q, double tol = 1e-12);

// ρ = (q ∫_0^∞ t^{q-1} w(±t) dt)^{1/q}; sign is +1 or -1.
double kq_radius_1d(const RadialFunction& w, double q, int direction_sign);

enum class ConcavityMode { borell, bobkov };

struct ConcavityReport {
  std::vector<double> q_grid;
  std::vector<double> phi;
  std::vector<double> second_differences;
  double max_second_difference = 0.0;
  bool holds = false;
};

ConcavityReport concavity_check(const RadialFunction& w, ConcavityMode mode, std::span<const double> q_grid,
                                double tol);

struct GrunbaumReport {
  double mass = 0.0;
  double positive_mass = 0.0;
  double barycenter = 0.0;
  double error = 0.0;
  bool within_bounds = false;
};

// Mass of [0, ∞) for a density with barycenter 0.
GrunbaumReport grunbaum_mass(const RadialFunction& w);

struct DensityZeroReport {
  double ratio = 0.0;
  double sup = 0.0;
  double argmax = 0.0;
  double positive_mass = 0.0;
  bool holds = false;
};

DensityZeroReport density_zero_bound(const RadialFunction& w, double eps);

// Exact marginal density of ⟨X, θ⟩ where a closed form or a 1-fold quadrature exists.
RadialFunction marginal_1d(const distributions::DensitySpec& spec, const Eigen::VectorXd& theta);
// Gaussian-kernel density estimate of ⟨X, θ⟩ with Silverman's bandwidth.
RadialFunction marginal_1d(const distributions::SampleBatch& batch, const Eigen::VectorXd& theta);

// Maximizer of a unimodal function on [a, b] by golden-section search.
double golden_section_argmax(const std::function<double(double)>& f, double a, double b, double bracket = 1e-10);

}  // namespace thinshell::radial
