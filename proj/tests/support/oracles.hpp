#pragma once

// Reference values built on the standard library only.

#include <cmath>
#include <functional>
#include <numbers>

namespace thinshell::oracle {

// Composite Simpson rule with an even number of panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int panels = 20000) {
  if (panels % 2 != 0) ++panels;
  const double h = (b - a) / panels;
  double acc = f(a) + f(b);
  for (int i = 1; i < panels; ++i) acc += f(a + i * h) * (i % 2 == 0 ? 2.0 : 4.0);
  return acc * h / 3.0;
}

// log E|G_n|^p = (p/2) log 2 + log Γ((n+p)/2) − log Γ(n/2).
inline double log_chi_moment(int n, double p) {
  return 0.5 * p * std::numbers::ln2 + std::lgamma(0.5 * (n + p)) - std::lgamma(0.5 * n);
}

// (E|G_n|^p)^{1/p} / √n.
inline double gaussian_moment_ratio(int n, double p) {
  return std::exp(log_chi_moment(n, p) / p - 0.5 * std::log(static_cast<double>(n)));
}

// (E Z^{−2p})^{1/2p} with Z = |G_n|/√n.
inline double chi_negative_moment(int n, double p) {
  return std::exp((log_chi_moment(n, -2.0 * p) + p * std::log(static_cast<double>(n))) / (2.0 * p));
}

// √Var|G_n| in extended precision.
inline double chi_sd(int n) {
  const long double mean =
      std::sqrt(2.0L) * std::exp(std::lgamma(0.5L * (n + 1)) - std::lgamma(0.5L * n));
  return static_cast<double>(std::sqrt(static_cast<long double>(n) - mean * mean));
}

// E|X|^p for the unit-variance Laplace law, by quadrature of its density.
inline double laplace_abs_moment(double p) {
  const double s = std::numbers::sqrt2;
  return simpson([&](double t) { return std::pow(t, p) * s * std::exp(-s * t); }, 0.0, 80.0, 400000);
}

}  // namespace thinshell::oracle
