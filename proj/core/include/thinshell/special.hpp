#pragma once

#include <span>

namespace thinshell {

// Thread-safe log Γ(x) for x > 0.
double log_gamma(double x);

// log of the surface area of S^{k-1} in R^k.
double log_sphere_area(int k);

// log E|G_k|^p for a standard Gaussian vector in R^k, p > -k.
double log_gaussian_norm_moment(int k, double p);

// log of the volume of the unit Euclidean ball in R^m.
double log_unit_ball_volume(int m);

double logsumexp(std::span<const double> values);

// log erfc(x), accurate for large positive x.
double log_erfc(double x);

}  // namespace thinshell
