#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace thinshell::distributions {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Family {
  gaussian,
  product_laplace,
  product_shifted_exponential,
  uniform_cube,
  uniform_ball,
  uniform_simplex,
  gaussian_convolution,
};

std::string_view to_string(Family family);
Family family_from_string(std::string_view name);
const std::vector<Family>& all_families();
bool is_product_family(Family family);

struct PsiAlphaProfile {
  enum class Provenance { exact, estimated };
  double alpha = 1.0;
  double b_alpha = 1.0;
  Provenance provenance = Provenance::estimated;
};

class LinearMap {
 public:
  explicit LinearMap(Eigen::MatrixXd matrix);
  static LinearMap identity(int n);

  const Eigen::MatrixXd& matrix() const { return matrix_; }
  int dim() const { return static_cast<int>(matrix_.rows()); }
  double hs_norm() const { return hs_norm_; }
  double op_norm() const { return op_norm_; }

 private:
  Eigen::MatrixXd matrix_;
  double hs_norm_ = 0.0;
  double op_norm_ = 0.0;
};

// A zoo member in isotropic position (when scale = 1) with barycenter at 0.
class DensitySpec {
 public:
  Family family() const { return family_; }
  int dim() const { return dim_; }
  const std::map<std::string, double>& params() const { return params_; }
  double scale() const { return scale_; }
  bool symmetric() const;
  bool barycenter_zero() const { return true; }
  bool isotropic() const { return scale_ == 1.0; }

  // Normalized log-density; -inf outside the support.
  double log_density(std::span<const double> x) const;
  double log_density(const Eigen::VectorXd& x) const;

  // Unit-variance one-coordinate density before scaling, for product families.
  double coordinate_log_density(double t) const;
  // Support of one coordinate (product families) as [lo, hi].
  std::pair<double, double> coordinate_support() const;

  // Parameters t > 0 along origin + t·dir where the density is not smooth,
  // including the exit point of a bounded support. Sorted ascending.
  std::vector<double> ray_breakpoints(const Eigen::VectorXd& origin, const Eigen::VectorXd& dir) const;

  // Writes one draw into out (length dim) from the counter stream of `row`.
  void sample_row(std::uint64_t seed, std::uint64_t row, std::span<double> out) const;

  // Exact profile where a closed form is known (gaussian only).
  std::optional<PsiAlphaProfile> exact_psi_profile() const;
  // The ψ_α exponent the experiments assume for this family.
  double default_alpha() const;

  std::string descriptor() const;
  std::string to_key_value() const;
  static DensitySpec from_key_value(std::string_view text);

  friend DensitySpec make_density(Family family, int n, const std::map<std::string, double>& params);

 private:
  Family family_ = Family::gaussian;
  int dim_ = 1;
  std::map<std::string, double> params_;
  double scale_ = 1.0;
  double log_normalizer_ = 0.0;
};

DensitySpec make_density(Family family, int n, const std::map<std::string, double>& params = {});

struct SampleBatch {
  RowMatrix values;
  std::uint64_t seed = 0;
  std::string spec_ref;
  std::optional<LinearMap> transform;
  std::optional<Eigen::VectorXd> shift;
  bool gaussian_convolved = false;

  int dim() const { return static_cast<int>(values.cols()); }
  Eigen::Index size() const { return values.rows(); }
};

SampleBatch sample(const DensitySpec& spec, Eigen::Index count, std::uint64_t seed);

// Symmetric-square-root whitening by the empirical (1/N) covariance.
SampleBatch isotropize(const SampleBatch& batch);

// Rows (A x + g)/√2 with g from the convolution-noise sub-stream of the batch seed.
SampleBatch convolve_gaussian(const SampleBatch& batch, const LinearMap& map);

Eigen::VectorXd empirical_mean(const SampleBatch& batch);
Eigen::MatrixXd empirical_covariance(const SampleBatch& batch);

// Uniform directions on S^{n-1} from the directions sub-stream.
std::vector<Eigen::VectorXd> sample_directions(int n, int count, std::uint64_t seed);

// Lower estimate of b_α: max over directions and p of ratio / p^{1/α}.
PsiAlphaProfile estimate_psi_alpha(const SampleBatch& batch, double alpha, std::span<const double> p_grid,
                                   int n_directions, std::uint64_t seed);
// Closed forms (gaussian, product families along coordinate axes), otherwise
// an internal sample of 2·10^5 points.
PsiAlphaProfile estimate_psi_alpha(const DensitySpec& spec, double alpha, std::span<const double> p_grid,
                                   int n_directions, std::uint64_t seed);

// E|X_1|^p for one unit-variance coordinate of a product family or the gaussian.
double coordinate_abs_moment(Family family, double p);

double effective_dim(int n, const LinearMap& map, const PsiAlphaProfile& profile);

// Binary persistence: 32-byte little-endian header (magic, N, n, seed) then
// row-major float64 values.
void save_batch(const SampleBatch& batch, const std::filesystem::path& path);
SampleBatch load_batch(const std::filesystem::path& path);

// Isotropic simplex helpers: x ↦ Hᵀx for the Helmert basis H (length n+1),
// and the unit direction of vertex i.
Eigen::VectorXd simplex_helmert_transpose(const Eigen::VectorXd& x);
Eigen::VectorXd simplex_vertex_direction(int n, int vertex);

}  // namespace thinshell::distributions
