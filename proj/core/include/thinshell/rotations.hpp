#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "thinshell/distributions.hpp"

namespace thinshell::rotations {

struct Rotation {
  Eigen::MatrixXd matrix;

  int dim() const { return static_cast<int>(matrix.rows()); }
  // max |uᵀu − Id| entrywise.
  double orthogonality_drift() const;
};

enum class MovementType { type1, type2, type3, general };

std::string_view to_string(MovementType type);

// E₀ = span(e₁..e_k), θ₀ = e₁.
struct FrameConfig {
  int n = 2;
  int k = 2;

  void validate() const;
};

struct TangentMovement {
  Eigen::MatrixXd B;
  double norm = 0.0;
  MovementType type = MovementType::general;
};

struct HkpEstimate {
  enum class Method { gaussian_exact, mc_cone };
  double value = 0.0;
  double std_error = 0.0;
  Method method = Method::gaussian_exact;
  std::size_t samples_used = 0;
};

// Haar rotation number `index` of the stream for `seed`.
Rotation haar_rotation(int n, std::uint64_t seed, std::uint64_t index = 0);

// ⟨B, C⟩ = ½ tr(BᵀC) on antisymmetric matrices.
double metric(const Eigen::MatrixXd& B, const Eigen::MatrixXd& C);
double movement_norm(const Eigen::MatrixXd& B);

// u₀·exp(sB).
Rotation geodesic_step(const Rotation& u0, const Eigen::MatrixXd& B, double s);

// Orthonormal generators of T_i. `general` returns all of so(n).
std::vector<TangentMovement> movement_basis(const FrameConfig& frame, MovementType type);
std::size_t movement_dimension(const FrameConfig& frame, MovementType type);

HkpEstimate hkp_exact_gaussian(const Eigen::MatrixXd& sigma, const Rotation& u, const FrameConfig& frame, double p);

// Cone estimator: E[|P_E Y|^p; angle(P_E Y, θ) ≤ γ] divided by the cap fraction.
HkpEstimate hkp_estimate_mc(const distributions::SampleBatch& y, const Rotation& u, const FrameConfig& frame,
                            double p, double cone_half_angle);

// Normalized surface measure of a geodesic cap of half-angle γ on S^{k-1}.
double cap_fraction(int k, double half_angle);

using HkpEvaluator = std::function<double(const Rotation&)>;

struct LipschitzEstimate {
  double type1 = 0.0;
  double type2 = 0.0;
  double type3 = 0.0;
  double general = 0.0;
  double overall = 0.0;
  // The same maximum at step δ/2.
  double overall_half_step = 0.0;
  double delta = 0.0;
  bool richardson_consistent = false;
  int probes = 0;
};

// Max over Haar probes of |∇ log h| restricted to each T_i and to so(n),
// from central differences along the orthonormal basis of so(n).
LipschitzEstimate empirical_log_lipschitz(const HkpEvaluator& h, const FrameConfig& frame, int probe_count,
                                          double delta, std::uint64_t seed);

struct ReverseHolderReport {
  double norm_q = 0.0;
  double norm_r = 0.0;
  double log_ratio = 0.0;
  double fitted_K = 0.0;
  bool finite = false;
};

ReverseHolderReport reverse_holder_check(std::span<const double> h_samples, double lipschitz, double q, double r,
                                         int n);

}  // namespace thinshell::rotations
