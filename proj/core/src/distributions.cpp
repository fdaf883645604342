#include "thinshell/distributions.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "thinshell/parallel.hpp"
#include "thinshell/rng.hpp"
#include "thinshell/special.hpp"

namespace thinshell::distributions {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kSqrt3 = 1.7320508075688772935;

struct FamilyName {
  Family family;
  std::string_view name;
};

constexpr std::array<FamilyName, 7> kFamilyNames{{
    {Family::gaussian, "gaussian"},
    {Family::product_laplace, "product-laplace"},
    {Family::product_shifted_exponential, "product-shifted-exponential"},
    {Family::uniform_cube, "uniform-cube"},
    {Family::uniform_ball, "uniform-ball"},
    {Family::uniform_simplex, "uniform-simplex"},
    {Family::gaussian_convolution, "gaussian-convolution"},
}};

double logaddexp(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double top = std::max(a, b);
  return top + std::log1p(std::exp(-std::abs(a - b)));
}

// Density of (L + G)/√2 with L unit-variance Laplace and G standard normal.
double convolution_log_density(double x) {
  const double s = kSqrt2 * x;
  const double a = -kSqrt2 * s + log_erfc(1.0 - s / kSqrt2);
  const double b = kSqrt2 * s + log_erfc(1.0 + s / kSqrt2);
  return std::log(0.5) + 1.0 + logaddexp(a, b);
}

double simplex_scale(int n) { return std::sqrt((n + 1.0) * (n + 2.0)); }

// Positive roots of |o + t d|^2 = r^2.
void sphere_crossings(const Eigen::VectorXd& o, const Eigen::VectorXd& d, double r, std::vector<double>& out) {
  const double a = d.squaredNorm();
  if (a == 0.0) return;
  const double b = o.dot(d);
  const double c = o.squaredNorm() - r * r;
  const double disc = b * b - a * c;
  if (disc <= 0.0) return;
  const double root = std::sqrt(disc);
  for (double t : {(-b - root) / a, (-b + root) / a})
    if (t > 0.0) out.push_back(t);
}

void write_u64(std::ostream& os, std::uint64_t v) {
  std::array<char, 8> bytes{};
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  os.write(bytes.data(), 8);
}

std::uint64_t read_u64(std::istream& is) {
  std::array<unsigned char, 8> bytes{};
  is.read(reinterpret_cast<char*>(bytes.data()), 8);
  if (!is) throw std::runtime_error("load_batch: truncated file");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return v;
}

constexpr std::string_view kBatchMagic = "TSBATCH1";

}  // namespace

std::string_view to_string(Family family) {
  for (const auto& entry : kFamilyNames)
    if (entry.family == family) return entry.name;
  throw std::invalid_argument("unknown family");
}

Family family_from_string(std::string_view name) {
  for (const auto& entry : kFamilyNames)
    if (entry.name == name) return entry.family;
  throw std::invalid_argument("unknown family: " + std::string(name));
}

const std::vector<Family>& all_families() {
  static const std::vector<Family> families = [] {
    std::vector<Family> out;
    for (const auto& entry : kFamilyNames) out.push_back(entry.family);
    return out;
  }();
  return families;
}

bool is_product_family(Family family) {
  return family == Family::product_laplace || family == Family::product_shifted_exponential ||
         family == Family::uniform_cube || family == Family::gaussian_convolution;
}

LinearMap::LinearMap(Eigen::MatrixXd matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0)
    throw std::invalid_argument("LinearMap: matrix must be square and non-empty");
  hs_norm_ = matrix_.norm();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(matrix_);
  op_norm_ = svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
}

LinearMap LinearMap::identity(int n) { return LinearMap(Eigen::MatrixXd::Identity(n, n)); }

bool DensitySpec::symmetric() const {
  if (family_ == Family::product_shifted_exponential) return false;
  if (family_ == Family::uniform_simplex) return dim_ == 1;
  return true;
}

double DensitySpec::coordinate_log_density(double t) const {
  switch (family_) {
    case Family::gaussian:
      return -0.5 * t * t - 0.5 * std::log(2.0 * std::numbers::pi);
    case Family::product_laplace:
      return -0.5 * std::log(2.0) - kSqrt2 * std::abs(t);
    case Family::product_shifted_exponential:
      return t >= -1.0 ? -(t + 1.0) : -kInf;
    case Family::uniform_cube:
      return std::abs(t) <= kSqrt3 ? -std::log(2.0 * kSqrt3) : -kInf;
    case Family::gaussian_convolution:
      return convolution_log_density(t);
    default:
      throw std::logic_error("coordinate_log_density: not a product family");
  }
}

std::pair<double, double> DensitySpec::coordinate_support() const {
  switch (family_) {
    case Family::product_shifted_exponential:
      return {-1.0, kInf};
    case Family::uniform_cube:
      return {-kSqrt3, kSqrt3};
    case Family::gaussian:
    case Family::product_laplace:
    case Family::gaussian_convolution:
      return {-kInf, kInf};
    default:
      throw std::logic_error("coordinate_support: not a product family");
  }
}

double DensitySpec::log_density(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim_) throw std::invalid_argument("log_density: dimension mismatch");
  const double inv = 1.0 / scale_;
  double acc = 0.0;
  switch (family_) {
    case Family::gaussian:
    case Family::product_laplace:
    case Family::product_shifted_exponential:
    case Family::uniform_cube:
    case Family::gaussian_convolution:
      for (double v : x) {
        acc += coordinate_log_density(v * inv);
        if (acc == -kInf) return acc;
      }
      return acc + log_normalizer_;
    case Family::uniform_ball: {
      double r2 = 0.0;
      for (double v : x) r2 += (v * inv) * (v * inv);
      return r2 <= dim_ + 2.0 ? log_normalizer_ : -kInf;
    }
    case Family::uniform_simplex: {
      Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(x.data(), dim_) * inv;
      const Eigen::VectorXd bary = simplex_helmert_transpose(y);
      const double floor = -simplex_scale(dim_) / (dim_ + 1.0);
      return bary.minCoeff() >= floor ? log_normalizer_ : -kInf;
    }
  }
  return -kInf;
}

double DensitySpec::log_density(const Eigen::VectorXd& x) const {
  return log_density(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
}

std::vector<double> DensitySpec::ray_breakpoints(const Eigen::VectorXd& origin, const Eigen::VectorXd& dir) const {
  if (origin.size() != dim_ || dir.size() != dim_) throw std::invalid_argument("ray_breakpoints: dimension mismatch");
  const Eigen::VectorXd o = origin / scale_;
  const Eigen::VectorXd d = dir / scale_;
  std::vector<double> out;
  auto crossing = [&](double level) {
    for (int i = 0; i < dim_; ++i) {
      if (d(i) == 0.0) continue;
      const double t = (level - o(i)) / d(i);
      if (t > 0.0) out.push_back(t);
    }
  };
  switch (family_) {
    case Family::gaussian:
    case Family::gaussian_convolution:
      break;
    case Family::product_laplace:
      crossing(0.0);
      break;
    case Family::product_shifted_exponential:
      crossing(-1.0);
      break;
    case Family::uniform_cube:
      crossing(kSqrt3);
      crossing(-kSqrt3);
      break;
    case Family::uniform_ball:
      sphere_crossings(o, d, std::sqrt(dim_ + 2.0), out);
      break;
    case Family::uniform_simplex: {
      const Eigen::VectorXd a = simplex_helmert_transpose(o);
      const Eigen::VectorXd b = simplex_helmert_transpose(d);
      const double floor = -simplex_scale(dim_) / (dim_ + 1.0);
      for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (b(i) == 0.0) continue;
        const double t = (floor - a(i)) / b(i);
        if (t > 0.0) out.push_back(t);
      }
      break;
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void DensitySpec::sample_row(std::uint64_t seed, std::uint64_t row, std::span<double> out) const {
  if (static_cast<int>(out.size()) != dim_) throw std::invalid_argument("sample_row: dimension mismatch");
  CounterRng rng(seed, Stream::base_sample, row);
  switch (family_) {
    case Family::gaussian:
      for (double& v : out) v = rng.normal();
      break;
    case Family::product_laplace:
      for (double& v : out) {
        const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
        v = sign * rng.exponential() / kSqrt2;
      }
      break;
    case Family::product_shifted_exponential:
      for (double& v : out) v = rng.exponential() - 1.0;
      break;
    case Family::uniform_cube:
      for (double& v : out) v = (2.0 * rng.uniform() - 1.0) * kSqrt3;
      break;
    case Family::uniform_ball: {
      double r2 = 0.0;
      for (double& v : out) {
        v = rng.normal();
        r2 += v * v;
      }
      const double radius = std::sqrt(dim_ + 2.0) * std::pow(rng.uniform(), 1.0 / dim_);
      const double factor = radius / std::sqrt(r2);
      for (double& v : out) v *= factor;
      break;
    }
    case Family::uniform_simplex: {
      // Dirichlet(1,...,1) in R^{n+1} mapped through the Helmert basis.
      const int n = dim_;
      std::vector<double> e(static_cast<std::size_t>(n) + 1);
      double total = 0.0;
      for (double& v : e) {
        v = rng.exponential();
        total += v;
      }
      const double s = simplex_scale(n) / total;
      double prefix = 0.0;
      for (int j = 1; j <= n; ++j) {
        prefix += e[static_cast<std::size_t>(j) - 1];
        out[static_cast<std::size_t>(j) - 1] =
            s * (prefix - j * e[static_cast<std::size_t>(j)]) / std::sqrt(static_cast<double>(j) * (j + 1.0));
      }
      break;
    }
    case Family::gaussian_convolution:
      for (double& v : out) {
        const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
        const double laplace = sign * rng.exponential() / kSqrt2;
        v = (laplace + rng.normal()) / kSqrt2;
      }
      break;
  }
  if (scale_ != 1.0)
    for (double& v : out) v *= scale_;
}

std::optional<PsiAlphaProfile> DensitySpec::exact_psi_profile() const {
  if (family_ != Family::gaussian) return std::nullopt;
  return PsiAlphaProfile{2.0, 1.0 / kSqrt2, PsiAlphaProfile::Provenance::exact};
}

double DensitySpec::default_alpha() const {
  switch (family_) {
    case Family::gaussian:
    case Family::uniform_cube:
    case Family::uniform_ball:
      return 2.0;
    default:
      return 1.0;
  }
}

std::string DensitySpec::descriptor() const {
  std::ostringstream os;
  os << to_string(family_) << "(n=" << dim_;
  if (scale_ != 1.0) os << ",scale=" << scale_;
  os << ")";
  return os.str();
}

std::string DensitySpec::to_key_value() const {
  std::ostringstream os;
  os.precision(17);
  os << "family=" << to_string(family_) << "\n";
  os << "dim=" << dim_ << "\n";
  for (const auto& [key, value] : params_) os << key << "=" << value << "\n";
  return os.str();
}

DensitySpec DensitySpec::from_key_value(std::string_view text) {
  std::istringstream is{std::string(text)};
  std::string line;
  std::optional<Family> family;
  std::optional<int> dim;
  std::map<std::string, double> params;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("DensitySpec: malformed line '" + line + "'");
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (key == "family") {
      family = family_from_string(value);
    } else if (key == "dim") {
      dim = std::stoi(value);
    } else {
      params[key] = std::stod(value);
    }
  }
  if (!family || !dim) throw std::invalid_argument("DensitySpec: family and dim are required");
  return make_density(*family, *dim, params);
}

DensitySpec make_density(Family family, int n, const std::map<std::string, double>& params) {
  if (n < 1) throw std::invalid_argument("make_density: dimension must be positive");
  DensitySpec spec;
  spec.family_ = family;
  spec.dim_ = n;
  for (const auto& [key, value] : params) {
    if (key != "scale") throw std::invalid_argument("make_density: unknown parameter '" + key + "'");
    if (!(value > 0.0) || !std::isfinite(value)) throw std::invalid_argument("make_density: scale must be positive");
    spec.scale_ = value;
  }
  spec.params_ = params;
  const double nd = n;
  switch (family) {
    case Family::gaussian:
    case Family::product_laplace:
    case Family::product_shifted_exponential:
    case Family::uniform_cube:
    case Family::gaussian_convolution:
      spec.log_normalizer_ = 0.0;
      break;
    case Family::uniform_ball:
      spec.log_normalizer_ = -(log_unit_ball_volume(n) + 0.5 * nd * std::log(nd + 2.0));
      break;
    case Family::uniform_simplex:
      spec.log_normalizer_ = -(nd * std::log(simplex_scale(n)) + 0.5 * std::log(nd + 1.0) - log_gamma(nd + 1.0));
      break;
  }
  spec.log_normalizer_ -= nd * std::log(spec.scale_);
  return spec;
}

SampleBatch sample(const DensitySpec& spec, Eigen::Index count, std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("sample: count must be positive");
  SampleBatch batch;
  batch.values.resize(count, spec.dim());
  batch.seed = seed;
  batch.spec_ref = spec.descriptor();
  const auto n = static_cast<std::size_t>(spec.dim());
  for_each_block(static_cast<std::size_t>(count), 4096, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t row = begin; row < end; ++row)
      spec.sample_row(seed, row, std::span<double>(batch.values.row(static_cast<Eigen::Index>(row)).data(), n));
  });
  return batch;
}

Eigen::VectorXd empirical_mean(const SampleBatch& batch) {
  return batch.values.colwise().sum().transpose() / static_cast<double>(batch.size());
}

Eigen::MatrixXd empirical_covariance(const SampleBatch& batch) {
  const Eigen::VectorXd mu = empirical_mean(batch);
  const RowMatrix centered = batch.values.rowwise() - mu.transpose();
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(batch.dim(), batch.dim());
  cov.selfadjointView<Eigen::Lower>().rankUpdate(centered.transpose(), 1.0 / static_cast<double>(batch.size()));
  return cov.selfadjointView<Eigen::Lower>();
}

SampleBatch isotropize(const SampleBatch& batch) {
  if (batch.size() <= batch.dim()) throw std::invalid_argument("isotropize: need more samples than dimensions");
  const Eigen::VectorXd mu = empirical_mean(batch);
  const Eigen::MatrixXd cov = empirical_covariance(batch);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  const Eigen::VectorXd lambda = eig.eigenvalues();
  if (!(lambda.maxCoeff() > 0.0) || lambda.minCoeff() <= 1e-12 * lambda.maxCoeff())
    throw std::domain_error("isotropize: singular covariance");
  const Eigen::MatrixXd whiten =
      eig.eigenvectors() * lambda.cwiseSqrt().cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
  SampleBatch out;
  out.seed = batch.seed;
  out.spec_ref = batch.spec_ref;
  out.gaussian_convolved = batch.gaussian_convolved;
  out.values = (batch.values.rowwise() - mu.transpose()) * whiten;
  out.transform = LinearMap(whiten);
  out.shift = mu;
  return out;
}

SampleBatch convolve_gaussian(const SampleBatch& batch, const LinearMap& map) {
  if (map.dim() != batch.dim()) throw std::invalid_argument("convolve_gaussian: dimension mismatch");
  SampleBatch out;
  out.seed = batch.seed;
  out.spec_ref = batch.spec_ref;
  out.transform = map;
  out.gaussian_convolved = true;
  out.values = batch.values * map.matrix().transpose();
  const auto rows = static_cast<std::size_t>(batch.size());
  const Eigen::Index n = batch.dim();
  for_each_block(rows, 4096, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t row = begin; row < end; ++row) {
      CounterRng rng(batch.seed, Stream::convolution_noise, row);
      auto r = out.values.row(static_cast<Eigen::Index>(row));
      for (Eigen::Index j = 0; j < n; ++j) r(j) = (r(j) + rng.normal()) / kSqrt2;
    }
  });
  return out;
}

std::vector<Eigen::VectorXd> sample_directions(int n, int count, std::uint64_t seed) {
  std::vector<Eigen::VectorXd> dirs;
  dirs.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int i = 0; i < count; ++i) {
    CounterRng rng(seed, Stream::directions, static_cast<std::uint64_t>(i));
    Eigen::VectorXd v(n);
    do {
      for (int j = 0; j < n; ++j) v(j) = rng.normal();
    } while (v.norm() == 0.0);
    dirs.push_back(v.normalized());
  }
  return dirs;
}

double coordinate_abs_moment(Family family, double p) {
  using boost::math::quadrature::gauss_kronrod;
  switch (family) {
    case Family::gaussian:
      return std::exp(0.5 * p * std::log(2.0) + log_gamma(0.5 * (p + 1.0)) - 0.5 * std::log(std::numbers::pi));
    case Family::product_laplace:
      return std::exp(log_gamma(p + 1.0) - 0.5 * p * std::log(2.0));
    case Family::uniform_cube:
      return std::pow(kSqrt3, p) / (p + 1.0);
    case Family::product_shifted_exponential: {
      const double head = gauss_kronrod<double, 61>::integrate(
          [p](double s) { return std::pow(s, p) * std::exp(s - 1.0); }, 0.0, 1.0, 15, 1e-14);
      return head + std::exp(log_gamma(p + 1.0) - 1.0);
    }
    case Family::gaussian_convolution: {
      const double half = gauss_kronrod<double, 61>::integrate(
          [p](double t) { return t > 0.0 ? std::exp(p * std::log(t) + convolution_log_density(t)) : 0.0; }, 0.0,
          kInf, 15, 1e-13);
      return 2.0 * half;
    }
    default:
      throw std::invalid_argument("coordinate_abs_moment: no closed form for this family");
  }
}

PsiAlphaProfile estimate_psi_alpha(const SampleBatch& batch, double alpha, std::span<const double> p_grid,
                                   int n_directions, std::uint64_t seed) {
  if (p_grid.empty() || n_directions < 1) throw std::invalid_argument("estimate_psi_alpha: empty grid");
  if (alpha < 1.0 || alpha > 2.0) throw std::invalid_argument("estimate_psi_alpha: alpha must lie in [1,2]");
  std::vector<double> grid(p_grid.begin(), p_grid.end());
  grid.push_back(2.0);
  const auto dirs = sample_directions(batch.dim(), n_directions, seed);
  double best = 0.0;
  for (const auto& theta : dirs) {
    const Eigen::VectorXd proj = batch.values * theta;
    const double m2 = proj.squaredNorm() / static_cast<double>(proj.size());
    const double top = proj.cwiseAbs().maxCoeff();
    if (!(m2 > 0.0)) continue;
    for (double p : grid) {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < proj.size(); ++i) acc += std::pow(std::abs(proj(i)) / top, p);
      const double log_norm = std::log(top) + std::log(acc / static_cast<double>(proj.size())) / p;
      const double ratio = std::exp(log_norm - 0.5 * std::log(m2) - std::log(p) / alpha);
      best = std::max(best, ratio);
    }
  }
  return PsiAlphaProfile{alpha, best, PsiAlphaProfile::Provenance::estimated};
}

PsiAlphaProfile estimate_psi_alpha(const DensitySpec& spec, double alpha, std::span<const double> p_grid,
                                   int n_directions, std::uint64_t seed) {
  if (p_grid.empty() || n_directions < 1) throw std::invalid_argument("estimate_psi_alpha: empty grid");
  if (alpha < 1.0 || alpha > 2.0) throw std::invalid_argument("estimate_psi_alpha: alpha must lie in [1,2]");
  if (spec.family() == Family::gaussian || is_product_family(spec.family())) {
    std::vector<double> grid(p_grid.begin(), p_grid.end());
    grid.push_back(2.0);
    double best = 0.0;
    for (double p : grid) {
      const double ratio = std::pow(coordinate_abs_moment(spec.family(), p), 1.0 / p) / std::pow(p, 1.0 / alpha);
      best = std::max(best, ratio);
    }
    return PsiAlphaProfile{alpha, best, PsiAlphaProfile::Provenance::exact};
  }
  return estimate_psi_alpha(sample(spec, 200000, seed), alpha, p_grid, n_directions, seed);
}

double effective_dim(int n, const LinearMap& map, const PsiAlphaProfile& profile) {
  if (map.dim() != n) throw std::invalid_argument("effective_dim: dimension mismatch");
  if (!(map.op_norm() > 0.0)) throw std::domain_error("effective_dim: zero operator norm");
  if (!(profile.b_alpha > 0.0)) throw std::invalid_argument("effective_dim: b_alpha must be positive");
  return map.hs_norm() * map.hs_norm() / (profile.b_alpha * profile.b_alpha * map.op_norm() * map.op_norm());
}

void save_batch(const SampleBatch& batch, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("save_batch: cannot open " + path.string());
  os.write(kBatchMagic.data(), 8);
  write_u64(os, static_cast<std::uint64_t>(batch.size()));
  write_u64(os, static_cast<std::uint64_t>(batch.dim()));
  write_u64(os, batch.seed);
  for (Eigen::Index i = 0; i < batch.values.size(); ++i)
    write_u64(os, std::bit_cast<std::uint64_t>(batch.values.data()[i]));
  if (!os) throw std::runtime_error("save_batch: write failed");
}

SampleBatch load_batch(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("load_batch: cannot open " + path.string());
  std::array<char, 8> magic{};
  is.read(magic.data(), 8);
  if (!is || std::string_view(magic.data(), 8) != kBatchMagic) throw std::runtime_error("load_batch: bad magic");
  const auto rows = read_u64(is);
  const auto cols = read_u64(is);
  SampleBatch batch;
  batch.seed = read_u64(is);
  batch.values.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < batch.values.size(); ++i) batch.values.data()[i] = std::bit_cast<double>(read_u64(is));
  return batch;
}

Eigen::VectorXd simplex_helmert_transpose(const Eigen::VectorXd& x) {
  const auto n = static_cast<int>(x.size());
  Eigen::VectorXd out(n + 1);
  double suffix = 0.0;
  for (int i = n + 1; i >= 1; --i) {
    if (i <= n) suffix += x(i - 1) / std::sqrt(static_cast<double>(i) * (i + 1.0));
    double value = suffix;
    if (i >= 2) value -= (i - 1.0) * x(i - 2) / std::sqrt((i - 1.0) * i);
    out(i - 1) = value;
  }
  return out;
}

Eigen::VectorXd simplex_vertex_direction(int n, int vertex) {
  if (vertex < 0 || vertex > n) throw std::out_of_range("simplex_vertex_direction: vertex index");
  const int i = vertex + 1;
  Eigen::VectorXd col = Eigen::VectorXd::Zero(n);
  for (int j = std::max(i, 1); j <= n; ++j) col(j - 1) = 1.0 / std::sqrt(static_cast<double>(j) * (j + 1.0));
  if (i >= 2) col(i - 2) = -(i - 1.0) / std::sqrt((i - 1.0) * i);
  return col.normalized();
}

}  // namespace thinshell::distributions
