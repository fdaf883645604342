#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace thinshell {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
  bool contains(double x) const { return lo <= x && x <= hi; }
};

// Exact binomial envelope for `successes` out of `trials` at the given
// two-sided confidence level.
Interval clopper_pearson(std::uint64_t successes, std::uint64_t trials, double confidence = 0.99);

// Linear-interpolation quantile of an unsorted sample (prob in [0,1]).
double quantile(std::vector<double> values, double prob);

double mean(std::span<const double> values);
// Unbiased sample variance.
double variance(std::span<const double> values);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual_sup = 0.0;
};

// Ordinary least squares y ≈ slope·x + intercept; needs ≥ 2 distinct x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

// Least-squares slope of y ≈ slope·x through the origin.
double fit_slope_through_origin(std::span<const double> x, std::span<const double> y);

}  // namespace thinshell
