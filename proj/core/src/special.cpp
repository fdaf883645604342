#include "thinshell/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace thinshell {

double log_gamma(double x) { return boost::math::lgamma(x); }

double log_sphere_area(int k) {
  return std::log(2.0) + 0.5 * k * std::log(std::numbers::pi) - log_gamma(0.5 * k);
}

double log_gaussian_norm_moment(int k, double p) {
  return 0.5 * p * std::log(2.0) + log_gamma(0.5 * (p + k)) - log_gamma(0.5 * k);
}

double log_unit_ball_volume(int m) {
  return 0.5 * m * std::log(std::numbers::pi) - log_gamma(0.5 * m + 1.0);
}

double logsumexp(std::span<const double> values) {
  if (values.empty()) return -std::numeric_limits<double>::infinity();
  const double top = *std::max_element(values.begin(), values.end());
  if (!std::isfinite(top)) return top;
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - top);
  return top + std::log(acc);
}

double log_erfc(double x) {
  if (x < 5.0) return std::log(boost::math::erfc(x));
  // erfc(x) = exp(-x^2) erfcx(x); erfcx by continued fraction.
  double cf = 0.0;
  for (int k = 60; k >= 1; --k) cf = 0.5 * k / (x + cf);
  return -x * x - 0.5 * std::log(std::numbers::pi) - std::log(x + cf);
}

}  // namespace thinshell
