#include "thinshell/rotations.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <boost/math/special_functions/beta.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include "thinshell/parallel.hpp"
#include "thinshell/rng.hpp"
#include "thinshell/special.hpp"

namespace thinshell::rotations {
namespace {

constexpr double kDriftLimit = 1e-12;

Eigen::MatrixXd elementary(int n, int i, int j) {
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
  B(j, i) = 1.0;
  B(i, j) = -1.0;
  return B;
}

// Movement type of the plane (e_i, e_j), i < j; general if h is invariant along it.
MovementType plane_type(const FrameConfig& frame, int i, int j) {
  if (i == 0 && j < frame.k) return MovementType::type1;
  if (i == 0) return MovementType::type2;
  if (i < frame.k && j >= frame.k) return MovementType::type3;
  return MovementType::general;
}

Eigen::MatrixXd reorthonormalize(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

}  // namespace

double Rotation::orthogonality_drift() const {
  const Eigen::MatrixXd gram = matrix.transpose() * matrix;
  return (gram - Eigen::MatrixXd::Identity(dim(), dim())).cwiseAbs().maxCoeff();
}

std::string_view to_string(MovementType type) {
  switch (type) {
    case MovementType::type1:
      return "type1";
    case MovementType::type2:
      return "type2";
    case MovementType::type3:
      return "type3";
    case MovementType::general:
      return "general";
  }
  return "general";
}

void FrameConfig::validate() const {
  if (k < 2 || k > n) throw std::invalid_argument("frame needs 2 ≤ k ≤ n");
}

Rotation haar_rotation(int n, std::uint64_t seed, std::uint64_t index) {
  if (n < 2) throw std::invalid_argument("haar_rotation: n must be at least 2");
  CounterRng rng(seed, Stream::haar, index);
  Eigen::MatrixXd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd& r = qr.matrixQR();
  for (int j = 0; j < n; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  if (q.determinant() < 0.0) q.col(n - 1) = -q.col(n - 1);
  return Rotation{std::move(q)};
}

double metric(const Eigen::MatrixXd& B, const Eigen::MatrixXd& C) { return 0.5 * (B.transpose() * C).trace(); }

double movement_norm(const Eigen::MatrixXd& B) { return std::sqrt(0.5) * B.norm(); }

Rotation geodesic_step(const Rotation& u0, const Eigen::MatrixXd& B, double s) {
  const int n = u0.dim();
  if (B.rows() != n || B.cols() != n) throw std::invalid_argument("geodesic_step: dimension mismatch");
  if ((B + B.transpose()).cwiseAbs().maxCoeff() != 0.0)
    throw std::invalid_argument("geodesic_step: B must be antisymmetric");
  if (s == 0.0) return u0;
  const double lambda = B.norm() / std::numbers::sqrt2;
  if (lambda == 0.0) return u0;
  const Eigen::MatrixXd B2 = B * B;
  Eigen::MatrixXd step;
  if ((B2 * B + lambda * lambda * B).cwiseAbs().maxCoeff() <= 1e-12 * lambda * lambda * lambda) {
    const double a = s * lambda;
    step = Eigen::MatrixXd::Identity(n, n) + (std::sin(a) / lambda) * B + ((1.0 - std::cos(a)) / (lambda * lambda)) * B2;
  } else {
    step = (s * B).exp();
  }
  Rotation out{u0.matrix * step};
  if (out.orthogonality_drift() > kDriftLimit) out.matrix = reorthonormalize(out.matrix);
  return out;
}

std::size_t movement_dimension(const FrameConfig& frame, MovementType type) {
  const auto n = static_cast<std::size_t>(frame.n);
  const auto k = static_cast<std::size_t>(frame.k);
  switch (type) {
    case MovementType::type1:
      return k - 1;
    case MovementType::type2:
      return n - k;
    case MovementType::type3:
      return (k - 1) * (n - k);
    case MovementType::general:
      return n * (n - 1) / 2;
  }
  return 0;
}

std::vector<TangentMovement> movement_basis(const FrameConfig& frame, MovementType type) {
  frame.validate();
  std::vector<TangentMovement> out;
  for (int i = 0; i < frame.n; ++i)
    for (int j = i + 1; j < frame.n; ++j) {
      const MovementType t = plane_type(frame, i, j);
      if (type != MovementType::general && t != type) continue;
      out.push_back({elementary(frame.n, i, j), 1.0, type == MovementType::general ? MovementType::general : t});
    }
  return out;
}

HkpEstimate hkp_exact_gaussian(const Eigen::MatrixXd& sigma, const Rotation& u, const FrameConfig& frame, double p) {
  frame.validate();
  const int k = frame.k;
  if (!(p > -k)) throw std::invalid_argument("hkp_exact_gaussian: p must exceed -k");
  if (sigma.rows() != frame.n || u.dim() != frame.n) throw std::invalid_argument("hkp_exact_gaussian: dimension mismatch");
  const Eigen::MatrixXd uk = u.matrix.leftCols(k);
  const Eigen::MatrixXd sigma_e = uk.transpose() * sigma * uk;
  Eigen::LLT<Eigen::MatrixXd> llt(sigma_e);
  const Eigen::VectorXd diag = llt.matrixL().toDenseMatrix().diagonal();
  if (llt.info() != Eigen::Success || diag.minCoeff() <= 1e-12 * std::sqrt(sigma_e.diagonal().maxCoeff()))
    throw std::domain_error("hkp_exact_gaussian: marginal covariance is singular");
  const double log_det = 2.0 * diag.array().log().sum();
  const Eigen::VectorXd e1 = Eigen::VectorXd::Unit(k, 0);
  const double quad = e1.dot(llt.solve(e1));
  const double a = 0.5 * (p + k);
  const double log_h = log_sphere_area(k) - 0.5 * k * std::log(2.0 * std::numbers::pi) - 0.5 * log_det +
                       (a - 1.0) * std::numbers::ln2 + log_gamma(a) - a * std::log(quad);
  return {std::exp(log_h), 0.0, HkpEstimate::Method::gaussian_exact, 0};
}

double cap_fraction(int k, double half_angle) {
  if (k < 2) throw std::invalid_argument("cap_fraction: k must be at least 2");
  if (half_angle <= 0.0) return 0.0;
  if (half_angle >= std::numbers::pi) return 1.0;
  if (half_angle > std::numbers::pi / 2) return 1.0 - cap_fraction(k, std::numbers::pi - half_angle);
  const double s = std::sin(half_angle);
  return 0.5 * boost::math::ibeta(0.5 * (k - 1), 0.5, s * s);
}

HkpEstimate hkp_estimate_mc(const distributions::SampleBatch& y, const Rotation& u, const FrameConfig& frame, double p,
                            double cone_half_angle) {
  frame.validate();
  const int k = frame.k;
  if (k > 4) throw std::invalid_argument("hkp_estimate_mc: k ≤ 4 required");
  if (!(p > -k + 1)) throw std::invalid_argument("hkp_estimate_mc: p must exceed -k+1");
  if (y.dim() != frame.n || u.dim() != frame.n) throw std::invalid_argument("hkp_estimate_mc: dimension mismatch");
  if (!(cone_half_angle > 0.0 && cone_half_angle < std::numbers::pi / 2))
    throw std::invalid_argument("hkp_estimate_mc: cone half-angle must lie in (0, π/2)");
  const Eigen::MatrixXd uk = u.matrix.leftCols(k);
  const double cos_limit = std::cos(cone_half_angle);
  const auto N = static_cast<std::size_t>(y.size());
  constexpr std::size_t kBlock = 1 << 14;
  const std::size_t blocks = block_count(N, kBlock);
  std::vector<double> sums(blocks, 0.0), squares(blocks, 0.0);
  std::vector<std::size_t> kept(blocks, 0);
  for_each_block(N, kBlock, [&](std::size_t b, std::size_t begin, std::size_t end) {
    const auto rows = static_cast<Eigen::Index>(end - begin);
    const Eigen::MatrixXd z = y.values.middleRows(static_cast<Eigen::Index>(begin), rows) * uk;
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double r = z.row(i).norm();
      if (r == 0.0 || z(i, 0) < cos_limit * r) continue;
      const double v = std::pow(r, p);
      sums[b] += v;
      squares[b] += v * v;
      ++kept[b];
    }
  });
  double sum = 0.0, sq = 0.0;
  std::size_t count = 0;
  for (std::size_t b = 0; b < blocks; ++b) {
    sum += sums[b];
    sq += squares[b];
    count += kept[b];
  }
  if (count < 200) throw std::runtime_error("hkp_estimate_mc: fewer than 200 samples in the cone");
  const double frac = cap_fraction(k, cone_half_angle);
  const double m = sum / static_cast<double>(N);
  const double var = std::max(0.0, sq / static_cast<double>(N) - m * m);
  return {m / frac, std::sqrt(var / static_cast<double>(N)) / frac, HkpEstimate::Method::mc_cone, count};
}

LipschitzEstimate empirical_log_lipschitz(const HkpEvaluator& h, const FrameConfig& frame, int probe_count,
                                          double delta, std::uint64_t seed) {
  frame.validate();
  if (!(delta >= 1e-4 && delta <= 1e-2)) throw std::invalid_argument("empirical_log_lipschitz: δ must lie in [1e-4, 1e-2]");
  if (probe_count < 1) throw std::invalid_argument("empirical_log_lipschitz: probe_count must be positive");
  const int n = frame.n;
  struct Plane {
    int i, j;
    MovementType type;
  };
  std::vector<Plane> planes;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) planes.push_back({i, j, plane_type(frame, i, j)});

  // Per probe: squared gradient norms per type, general, and general at δ/2.
  using Row = std::array<double, 5>;
  std::vector<Row> results(static_cast<std::size_t>(probe_count));
  auto log_h = [&](const Rotation& u) {
    const double v = h(u);
    if (!(v > 0.0) || !std::isfinite(v)) throw std::runtime_error("empirical_log_lipschitz: h must be positive and finite");
    return std::log(v);
  };
  for_each_block(results.size(), 1, [&](std::size_t probe, std::size_t, std::size_t) {
    const Rotation u = haar_rotation(n, seed, probe);
    Row row{};
    for (const Plane& pl : planes) {
      const Eigen::MatrixXd B = elementary(n, pl.i, pl.j);
      const double d = (log_h(geodesic_step(u, B, delta)) - log_h(geodesic_step(u, B, -delta))) / (2.0 * delta);
      const double half = 0.5 * delta;
      const double dh = (log_h(geodesic_step(u, B, half)) - log_h(geodesic_step(u, B, -half))) / delta;
      if (pl.type != MovementType::general) row[static_cast<std::size_t>(pl.type)] += d * d;
      row[3] += d * d;
      row[4] += dh * dh;
    }
    results[probe] = row;
  });
  LipschitzEstimate out;
  out.delta = delta;
  out.probes = probe_count;
  for (const Row& row : results) {
    out.type1 = std::max(out.type1, std::sqrt(row[0]));
    out.type2 = std::max(out.type2, std::sqrt(row[1]));
    out.type3 = std::max(out.type3, std::sqrt(row[2]));
    out.general = std::max(out.general, std::sqrt(row[3]));
    out.overall_half_step = std::max(out.overall_half_step, std::sqrt(row[4]));
  }
  out.overall = std::max({out.type1, out.type2, out.type3, out.general});
  const double scale = std::max(out.overall, out.overall_half_step);
  out.richardson_consistent = scale < 1e-9 || std::abs(out.overall - out.overall_half_step) <= 0.05 * scale;
  return out;
}

ReverseHolderReport reverse_holder_check(std::span<const double> h_samples, double lipschitz, double q, double r,
                                         int n) {
  if (!(r > 0.0 && q > r)) throw std::invalid_argument("reverse_holder_check: need 0 < r < q");
  if (h_samples.size() < 1000) throw std::invalid_argument("reverse_holder_check: at least 1000 samples required");
  std::vector<double> logs(h_samples.size());
  for (std::size_t i = 0; i < h_samples.size(); ++i) {
    if (!(h_samples[i] > 0.0)) throw std::domain_error("reverse_holder_check: h must be positive");
    logs[i] = std::log(h_samples[i]);
  }
  const double log_n = std::log(static_cast<double>(logs.size()));
  auto log_norm = [&](double s) {
    std::vector<double> scaled(logs.size());
    std::transform(logs.begin(), logs.end(), scaled.begin(), [s](double l) { return s * l; });
    return (logsumexp(scaled) - log_n) / s;
  };
  ReverseHolderReport out;
  const double lq = log_norm(q);
  const double lr = log_norm(r);
  out.norm_q = std::exp(lq);
  out.norm_r = std::exp(lr);
  out.log_ratio = lq - lr;
  if (lipschitz > 0.0) {
    out.fitted_K = n * out.log_ratio / (lipschitz * lipschitz * (q - r));
  } else {
    out.fitted_K = std::abs(out.log_ratio) <= 1e-14 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  out.finite = std::isfinite(out.fitted_K);
  return out;
}

}  // namespace thinshell::rotations
