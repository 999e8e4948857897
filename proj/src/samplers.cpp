#include "ibeetfa/samplers.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "ibeetfa/error.hpp"

namespace ibeetfa {

namespace {

// Below this sigma the integer sampler inverts the exact (tail-cut) mass
// function; the geometric envelope becomes inefficient for narrow Gaussians.
constexpr double kTableSigma = 4.0;

int64_t sample_z_table(double sigma, double center, RandomSource& rng) {
  const double width = std::ceil(kTailCut * sigma) + 1.0;
  const auto lo = static_cast<int64_t>(std::floor(center - width));
  const auto hi = static_cast<int64_t>(std::ceil(center + width));
  const double scale = std::numbers::pi / (sigma * sigma);
  // Exponents relative to the nearest integer keep the weights in range.
  double total = 0.0;
  std::vector<double> w(static_cast<size_t>(hi - lo + 1));
  for (int64_t x = lo; x <= hi; ++x) {
    const double d = static_cast<double>(x) - center;
    w[static_cast<size_t>(x - lo)] = std::exp(-scale * d * d);
    total += w[static_cast<size_t>(x - lo)];
  }
  if (!(total > 0.0)) {
    // Every weight underflowed: sigma is far below the integer spacing.
    return static_cast<int64_t>(std::llround(center));
  }
  double u = rng.uniform_double() * total;
  for (size_t i = 0; i < w.size(); ++i) {
    if (u < w[i]) return lo + static_cast<int64_t>(i);
    u -= w[i];
  }
  return hi;
}

// Rejection against a two-sided geometric envelope with decay 1/s, where s is
// the standard deviation sigma / sqrt(2 pi). From (d/s - 1)^2 >= 0,
// exp(-d^2 / 2s^2) <= exp(1/2 - d/s), so a candidate at distance d is kept
// with probability exp(-(d/s - 1)^2 / 2).
int64_t sample_z_envelope(double sigma, double center, RandomSource& rng) {
  const double s = sigma / std::sqrt(2.0 * std::numbers::pi);
  const double log_r = -1.0 / s;
  const double fl = std::floor(center);
  const double right_start = fl + 1.0;
  const double w_right = std::exp(-(right_start - center) / s);
  const double w_left = std::exp(-(center - fl) / s);
  const double p_right = w_right / (w_right + w_left);
  const double cut = kTailCut * sigma;
  for (int attempt = 0; attempt < 100000; ++attempt) {
    const bool right = rng.uniform_double() < p_right;
    const double j = std::floor(std::log(rng.uniform_open_closed()) / log_r);
    const double x = right ? right_start + j : fl - j;
    const double d = std::abs(x - center);
    if (d > cut) continue;
    const double t = d / s - 1.0;
    if (rng.uniform_double() < std::exp(-0.5 * t * t)) return static_cast<int64_t>(x);
  }
  throw Error(ErrorCode::kSamplingFailed, "integer Gaussian rejection did not terminate");
}

}  // namespace

double slack(size_t k) {
  if (k < 2) return 1.0;
  return std::ceil(std::sqrt(std::log2(static_cast<double>(k)))) + 1.0;
}

int64_t sample_z_gaussian(double sigma, double center, RandomSource& rng) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorCode::kInvalidArgument, "sigma must be positive, got " + std::to_string(sigma));
  }
  if (!std::isfinite(center)) throw Error(ErrorCode::kInvalidArgument, "center must be finite");
  return sigma < kTableSigma ? sample_z_table(sigma, center, rng)
                             : sample_z_envelope(sigma, center, rng);
}

LatticeGaussian::LatticeGaussian(const IntMatrix& basis) : basis_(basis) {
  if (basis.rows() != basis.cols() || basis.rows() == 0) {
    throw Error(ErrorCode::kDimensionMismatch, "lattice basis must be square");
  }
  if (!full_column_rank(basis)) throw Error(ErrorCode::kRankDeficient, "lattice basis is singular");
  const size_t d = basis.cols();
  Eigen::MatrixXd b(d, d);
  for (size_t r = 0; r < d; ++r)
    for (size_t c = 0; c < d; ++c) b(r, c) = static_cast<double>(basis(r, c));
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(b);
  Eigen::MatrixXd qm = qr.householderQ();
  Eigen::MatrixXd rm = qr.matrixQR().triangularView<Eigen::Upper>();
  q_.assign(qm.data(), qm.data() + d * d);
  r_.assign(rm.data(), rm.data() + d * d);
  for (size_t i = 0; i < d; ++i) gs_norm_ = std::max(gs_norm_, std::abs(r_[i * d + i]));
}

std::vector<int64_t> LatticeGaussian::sample(double sigma, std::span<const double> center,
                                             RandomSource& rng) const {
  const size_t d = dim();
  if (center.size() != d) throw Error(ErrorCode::kDimensionMismatch, "center length");
  // y = Q^T c, then walk the triangular system from the last Gram-Schmidt
  // direction to the first.
  std::vector<double> y(d);
  for (size_t i = 0; i < d; ++i) {
    const double* qi = q_.data() + i * d;
    double acc = 0.0;
    for (size_t k = 0; k < d; ++k) acc += qi[k] * center[k];
    y[i] = acc;
  }
  std::vector<int64_t> z(d);
  for (size_t ii = d; ii-- > 0;) {
    const double* ri = r_.data() + ii * d;
    const double rii = ri[ii];
    const int64_t zi = sample_z_gaussian(sigma / std::abs(rii), y[ii] / rii, rng);
    z[ii] = zi;
    if (zi == 0) continue;
    const double zf = static_cast<double>(zi);
    for (size_t k = 0; k < ii; ++k) y[k] -= ri[k] * zf;
  }
  std::vector<__int128> acc(d, 0);
  for (size_t r = 0; r < d; ++r) {
    auto row = basis_.row(r);
    __int128 s = 0;
    for (size_t c = 0; c < d; ++c) s += static_cast<__int128>(row[c]) * z[c];
    acc[r] = s;
  }
  std::vector<int64_t> out(d);
  for (size_t r = 0; r < d; ++r) {
    if (acc[r] > INT64_MAX || acc[r] < INT64_MIN) {
      throw Error(ErrorCode::kSamplingFailed, "lattice sample overflowed 64 bits");
    }
    out[r] = static_cast<int64_t>(acc[r]);
  }
  return out;
}

std::vector<int64_t> sample_d_lattice(const IntMatrix& basis, double sigma,
                                      std::span<const double> center, RandomSource& rng) {
  return LatticeGaussian(basis).sample(sigma, center, rng);
}

uint64_t sample_psi_bar(double alpha, const Modulus& q, RandomSource& rng) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "alpha must lie in (0, 1), got " + std::to_string(alpha));
  }
  const double stddev = alpha / std::sqrt(2.0 * std::numbers::pi);
  const double x = rng.normal() * stddev;
  const auto rounded = static_cast<int64_t>(std::llround(static_cast<double>(q.value()) * x));
  return q.reduce(rounded);
}

ZqVector sample_psi_bar_vector(double alpha, const Modulus& q, size_t dim, RandomSource& rng) {
  std::vector<uint64_t> out(dim);
  for (auto& v : out) v = sample_psi_bar(alpha, q, rng);
  return ZqVector(q, std::move(out));
}

IntMatrix sample_sign_matrix(size_t m, RandomSource& rng) {
  if (m == 0) throw Error(ErrorCode::kInvalidArgument, "sign matrix of size 0");
  std::vector<int64_t> e(m * m);
  for (auto& v : e) v = rng.bit() ? 1 : -1;
  return IntMatrix(m, m, std::move(e));
}

IntMatrix sample_bounded_matrix(int64_t ell, size_t m, RandomSource& rng) {
  if (ell < 1 || m == 0) throw Error(ErrorCode::kInvalidArgument, "bounded matrix needs ell, m >= 1");
  const auto width = static_cast<uint64_t>(2 * ell + 1);
  std::vector<int64_t> e(m * m);
  for (auto& v : e) v = static_cast<int64_t>(rng.uniform_below(width)) - ell;
  return IntMatrix(m, m, std::move(e));
}

ZqMatrix sample_uniform_zq(size_t rows, size_t cols, const Modulus& q, RandomSource& rng) {
  std::vector<uint64_t> e(rows * cols);
  for (auto& v : e) v = rng.uniform_below(q.value());
  return ZqMatrix(q, rows, cols, std::move(e));
}

ZqVector sample_uniform_zq_vector(size_t dim, const Modulus& q, RandomSource& rng) {
  std::vector<uint64_t> e(dim);
  for (auto& v : e) v = rng.uniform_below(q.value());
  return ZqVector(q, std::move(e));
}

}  // namespace ibeetfa
