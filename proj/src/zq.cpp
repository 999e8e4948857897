#include "ibeetfa/zq.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>

#include "ibeetfa/error.hpp"

namespace ibeetfa {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kDimensionMismatch: return "dimension mismatch";
    case ErrorCode::kRankDeficient: return "rank deficient";
    case ErrorCode::kSigmaTooSmall: return "sigma too small";
    case ErrorCode::kInvalidParams: return "invalid parameters";
    case ErrorCode::kSamplingFailed: return "sampling failed";
    case ErrorCode::kFormat: return "format error";
  }
  return "error";
}

namespace {

uint64_t mulmod(uint64_t a, uint64_t b, uint64_t m) {
  return static_cast<uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

uint64_t powmod(uint64_t b, uint64_t e, uint64_t m) {
  uint64_t r = 1 % m;
  b %= m;
  while (e) {
    if (e & 1) r = mulmod(r, b, m);
    b = mulmod(b, b, m);
    e >>= 1;
  }
  return r;
}

void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) throw Error(code, what);
}

std::string dims(size_t r, size_t c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

}  // namespace

bool is_prime(uint64_t n) {
  if (n < 2) return false;
  for (uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % p == 0) return n == p;
  }
  uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // Deterministic for all 64-bit n.
  for (uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < s; ++i) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

Modulus::Modulus(uint64_t q) : q_(q) {
  require(q >= 3 && (q & 1) && q < (1ULL << 62) && is_prime(q),
          ErrorCode::kInvalidArgument,
          "modulus must be an odd prime in [3, 2^62), got " + std::to_string(q));
}

unsigned Modulus::bits() const {
  return 64 - static_cast<unsigned>(__builtin_clzll(q_));
}

uint64_t Modulus::pow(uint64_t base, uint64_t exp) const { return powmod(base, exp, q_); }

uint64_t Modulus::inverse(uint64_t a) const {
  require(a % q_ != 0, ErrorCode::kInvalidArgument, "zero has no inverse");
  return powmod(a, q_ - 2, q_);
}

// ---------------------------------------------------------------------------

ZqMatrix::ZqMatrix(Modulus q, size_t rows, size_t cols)
    : q_(q), rows_(rows), cols_(cols), data_(rows * cols, 0) {}

ZqMatrix::ZqMatrix(Modulus q, size_t rows, size_t cols, std::vector<uint64_t> entries)
    : q_(q), rows_(rows), cols_(cols), data_(std::move(entries)) {
  require(data_.size() == rows * cols, ErrorCode::kDimensionMismatch,
          "entry count " + std::to_string(data_.size()) + " for " + dims(rows, cols));
  for (uint64_t v : data_) {
    require(v < q_.value(), ErrorCode::kInvalidArgument, "entry not reduced mod q");
  }
}

IntMatrix::IntMatrix(size_t rows, size_t cols, std::vector<int64_t> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  require(data_.size() == rows * cols, ErrorCode::kDimensionMismatch,
          "entry count " + std::to_string(data_.size()) + " for " + dims(rows, cols));
  for (int64_t v : data_) max_abs_ = std::max(max_abs_, v < 0 ? -v : v);
}

IntMatrix IntMatrix::identity(size_t dim) {
  std::vector<int64_t> e(dim * dim, 0);
  for (size_t i = 0; i < dim; ++i) e[i * dim + i] = 1;
  return IntMatrix(dim, dim, std::move(e));
}

IntMatrix IntMatrix::from_columns(size_t rows, std::span<const std::vector<int64_t>> columns) {
  std::vector<int64_t> e(rows * columns.size());
  for (size_t c = 0; c < columns.size(); ++c) {
    require(columns[c].size() == rows, ErrorCode::kDimensionMismatch, "column length");
    for (size_t r = 0; r < rows; ++r) e[r * columns.size() + c] = columns[c][r];
  }
  return IntMatrix(rows, columns.size(), std::move(e));
}

std::vector<int64_t> IntMatrix::column(size_t c) const {
  std::vector<int64_t> out(rows_);
  for (size_t r = 0; r < rows_; ++r) out[r] = data_[r * cols_ + c];
  return out;
}

IntMatrix IntMatrix::transpose() const {
  std::vector<int64_t> e(data_.size());
  for (size_t r = 0; r < rows_; ++r)
    for (size_t c = 0; c < cols_; ++c) e[c * rows_ + r] = data_[r * cols_ + c];
  return IntMatrix(cols_, rows_, std::move(e));
}

ZqVector::ZqVector(Modulus q, size_t dim) : q_(q), data_(dim, 0) {}

ZqVector::ZqVector(Modulus q, std::vector<uint64_t> entries) : q_(q), data_(std::move(entries)) {
  for (uint64_t v : data_) {
    require(v < q_.value(), ErrorCode::kInvalidArgument, "entry not reduced mod q");
  }
}

ZqVector ZqVector::slice(size_t offset, size_t len) const {
  require(offset + len <= data_.size(), ErrorCode::kDimensionMismatch, "slice out of range");
  return ZqVector(q_, std::vector<uint64_t>(data_.begin() + offset, data_.begin() + offset + len));
}

// ---------------------------------------------------------------------------

ZqMatrix mat_mul(const ZqMatrix& a, const ZqMatrix& b) {
  require(a.cols() == b.rows(), ErrorCode::kDimensionMismatch,
          dims(a.rows(), a.cols()) + " * " + dims(b.rows(), b.cols()));
  require(a.modulus() == b.modulus(), ErrorCode::kInvalidArgument, "moduli differ");
  const Modulus& q = a.modulus();
  std::vector<unsigned __int128> acc(b.cols());
  std::vector<uint64_t> out(a.rows() * b.cols());
  for (size_t i = 0; i < a.rows(); ++i) {
    std::fill(acc.begin(), acc.end(), 0);
    for (size_t k = 0; k < a.cols(); ++k) {
      const uint64_t aik = a(i, k);
      if (aik == 0) continue;
      auto brow = b.row(k);
      for (size_t j = 0; j < b.cols(); ++j) {
        acc[j] += static_cast<unsigned __int128>(aik) * brow[j];
      }
      // Keep the accumulators far from overflow for wide inner dimensions.
      if ((k & 0xffff) == 0xffff) {
        for (auto& x : acc) x %= q.value();
      }
    }
    for (size_t j = 0; j < b.cols(); ++j) out[i * b.cols() + j] = q.reduce_wide(acc[j]);
  }
  return ZqMatrix(q, a.rows(), b.cols(), std::move(out));
}

ZqMatrix mat_mul(const ZqMatrix& a, const IntMatrix& b) {
  require(a.cols() == b.rows(), ErrorCode::kDimensionMismatch,
          dims(a.rows(), a.cols()) + " * " + dims(b.rows(), b.cols()));
  return mat_mul(a, reduce(b, a.modulus()));
}

ZqMatrix mat_add(const ZqMatrix& a, const ZqMatrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorCode::kDimensionMismatch,
          dims(a.rows(), a.cols()) + " + " + dims(b.rows(), b.cols()));
  const Modulus& q = a.modulus();
  std::vector<uint64_t> out(a.size());
  auto ea = a.entries();
  auto eb = b.entries();
  for (size_t i = 0; i < out.size(); ++i) out[i] = q.add(ea[i], eb[i]);
  return ZqMatrix(q, a.rows(), a.cols(), std::move(out));
}

ZqVector mat_vec(const ZqMatrix& a, std::span<const int64_t> x) {
  require(a.cols() == x.size(), ErrorCode::kDimensionMismatch,
          dims(a.rows(), a.cols()) + " * vector of " + std::to_string(x.size()));
  const Modulus& q = a.modulus();
  std::vector<uint64_t> xr(x.size());
  for (size_t i = 0; i < x.size(); ++i) xr[i] = q.reduce(x[i]);
  std::vector<uint64_t> out(a.rows());
  for (size_t i = 0; i < a.rows(); ++i) {
    unsigned __int128 acc = 0;
    auto row = a.row(i);
    for (size_t k = 0; k < row.size(); ++k) {
      acc += static_cast<unsigned __int128>(row[k]) * xr[k];
    }
    out[i] = q.reduce_wide(acc);
  }
  return ZqVector(q, std::move(out));
}

ZqVector transpose_mul(const ZqMatrix& a, const ZqVector& s) {
  require(a.rows() == s.dim(), ErrorCode::kDimensionMismatch,
          "transpose of " + dims(a.rows(), a.cols()) + " * vector of " + std::to_string(s.dim()));
  const Modulus& q = a.modulus();
  std::vector<unsigned __int128> acc(a.cols(), 0);
  for (size_t i = 0; i < a.rows(); ++i) {
    auto row = a.row(i);
    for (size_t j = 0; j < row.size(); ++j) acc[j] += static_cast<unsigned __int128>(row[j]) * s[i];
  }
  std::vector<uint64_t> out(a.cols());
  for (size_t j = 0; j < out.size(); ++j) out[j] = q.reduce_wide(acc[j]);
  return ZqVector(q, std::move(out));
}

ZqVector transpose_mul(const IntMatrix& m, const ZqVector& y) {
  require(m.rows() == y.dim(), ErrorCode::kDimensionMismatch,
          "transpose of " + dims(m.rows(), m.cols()) + " * vector of " + std::to_string(y.dim()));
  const Modulus& q = y.modulus();
  auto yc = center_rep(y);
  std::vector<__int128> acc(m.cols(), 0);
  for (size_t i = 0; i < m.rows(); ++i) {
    if (yc[i] == 0) continue;
    auto row = m.row(i);
    for (size_t j = 0; j < row.size(); ++j) acc[j] += static_cast<__int128>(row[j]) * yc[i];
  }
  std::vector<uint64_t> out(m.cols());
  const auto qq = static_cast<__int128>(q.value());
  for (size_t j = 0; j < out.size(); ++j) {
    __int128 r = acc[j] % qq;
    out[j] = static_cast<uint64_t>(r < 0 ? r + qq : r);
  }
  return ZqVector(q, std::move(out));
}

ZqVector vec_add(const ZqVector& a, const ZqVector& b) {
  require(a.dim() == b.dim(), ErrorCode::kDimensionMismatch, "vector lengths differ");
  std::vector<uint64_t> out(a.dim());
  for (size_t i = 0; i < out.size(); ++i) out[i] = a.modulus().add(a[i], b[i]);
  return ZqVector(a.modulus(), std::move(out));
}

ZqVector vec_sub(const ZqVector& a, const ZqVector& b) {
  require(a.dim() == b.dim(), ErrorCode::kDimensionMismatch, "vector lengths differ");
  std::vector<uint64_t> out(a.dim());
  for (size_t i = 0; i < out.size(); ++i) out[i] = a.modulus().sub(a[i], b[i]);
  return ZqVector(a.modulus(), std::move(out));
}

ZqVector concat(std::span<const ZqVector> parts) {
  require(!parts.empty(), ErrorCode::kInvalidArgument, "nothing to concatenate");
  std::vector<uint64_t> out;
  for (const auto& p : parts) {
    require(p.modulus() == parts[0].modulus(), ErrorCode::kInvalidArgument, "moduli differ");
    out.insert(out.end(), p.entries().begin(), p.entries().end());
  }
  return ZqVector(parts[0].modulus(), std::move(out));
}

ZqMatrix concat_cols(std::span<const ZqMatrix> parts) {
  require(!parts.empty(), ErrorCode::kInvalidArgument, "nothing to concatenate");
  const size_t rows = parts[0].rows();
  size_t cols = 0;
  for (const auto& p : parts) {
    require(p.rows() == rows, ErrorCode::kDimensionMismatch,
            "row counts differ: " + std::to_string(rows) + " vs " + std::to_string(p.rows()));
    require(p.modulus() == parts[0].modulus(), ErrorCode::kInvalidArgument, "moduli differ");
    cols += p.cols();
  }
  std::vector<uint64_t> out;
  out.reserve(rows * cols);
  for (size_t r = 0; r < rows; ++r) {
    for (const auto& p : parts) {
      auto row = p.row(r);
      out.insert(out.end(), row.begin(), row.end());
    }
  }
  return ZqMatrix(parts[0].modulus(), rows, cols, std::move(out));
}

ZqMatrix column_block(const ZqMatrix& a, size_t first, size_t count) {
  require(first + count <= a.cols(), ErrorCode::kDimensionMismatch, "column block out of range");
  std::vector<uint64_t> out;
  out.reserve(a.rows() * count);
  for (size_t r = 0; r < a.rows(); ++r) {
    auto row = a.row(r).subspan(first, count);
    out.insert(out.end(), row.begin(), row.end());
  }
  return ZqMatrix(a.modulus(), a.rows(), count, std::move(out));
}

ZqVector column_of(const ZqMatrix& a, size_t c) {
  std::vector<uint64_t> out(a.rows());
  for (size_t r = 0; r < a.rows(); ++r) out[r] = a(r, c);
  return ZqVector(a.modulus(), std::move(out));
}

int64_t center_rep(uint64_t residue, const Modulus& q) {
  const uint64_t r = residue % q.value();
  return r > q.half() ? static_cast<int64_t>(r) - static_cast<int64_t>(q.value())
                      : static_cast<int64_t>(r);
}

std::vector<int64_t> center_rep(const ZqVector& v) {
  std::vector<int64_t> out(v.dim());
  for (size_t i = 0; i < out.size(); ++i) out[i] = center_rep(v[i], v.modulus());
  return out;
}

IntMatrix center_rep(const ZqMatrix& a) {
  std::vector<int64_t> out(a.size());
  auto e = a.entries();
  for (size_t i = 0; i < out.size(); ++i) out[i] = center_rep(e[i], a.modulus());
  return IntMatrix(a.rows(), a.cols(), std::move(out));
}

ZqMatrix reduce(const IntMatrix& a, const Modulus& q) {
  std::vector<uint64_t> out(a.size());
  auto e = a.entries();
  for (size_t i = 0; i < out.size(); ++i) out[i] = q.reduce(e[i]);
  return ZqMatrix(q, a.rows(), a.cols(), std::move(out));
}

// ---------------------------------------------------------------------------

IncrementalRank::IncrementalRank(size_t dim, uint64_t prime) : dim_(dim), p_(prime) {
  require(prime < (1ULL << 22), ErrorCode::kInvalidArgument, "rank prime too large");
}

bool IncrementalRank::try_add(std::span<const int64_t> v) {
  require(v.size() == dim_, ErrorCode::kDimensionMismatch, "vector length");
  if (rows_.size() == dim_) return false;
  const int64_t p = static_cast<int64_t>(p_);
  // Entries stay below p^2 * (rank + 1) < 2^64 without intermediate reduction.
  std::vector<uint64_t> acc(dim_);
  for (size_t i = 0; i < dim_; ++i) {
    int64_t r = v[i] % p;
    acc[i] = static_cast<uint64_t>(r < 0 ? r + p : r);
  }
  for (size_t k = 0; k < rows_.size(); ++k) {
    const uint64_t c = acc[lead_[k]] % p_;
    if (c == 0) continue;
    const uint64_t f = p_ - c;
    const uint64_t* row = rows_[k].data();
    for (size_t i = 0; i < dim_; ++i) acc[i] += f * row[i];
  }
  size_t lead = dim_;
  for (size_t i = 0; i < dim_; ++i) {
    acc[i] %= p_;
    if (lead == dim_ && acc[i] != 0) lead = i;
  }
  if (lead == dim_) return false;
  const uint64_t inv = powmod(acc[lead], p_ - 2, p_);
  for (size_t i = 0; i < dim_; ++i) acc[i] = acc[i] * inv % p_;
  rows_.push_back(std::move(acc));
  lead_.push_back(lead);
  return true;
}

bool full_column_rank(const IntMatrix& s) {
  if (s.cols() > s.rows()) return false;
  if (s.cols() == 0) return true;
  IntMatrix st = s.transpose();
  for (uint64_t p : kRankPrimes) {
    IncrementalRank rank(s.rows(), p);
    bool all = true;
    for (size_t c = 0; c < st.rows(); ++c) {
      if (!rank.try_add(st.row(c))) {
        all = false;
        break;
      }
    }
    if (all) return true;
  }
  return false;
}

bool check_nullspace_basis(const ZqMatrix& f, const IntMatrix& s) {
  require(f.cols() == s.rows(), ErrorCode::kDimensionMismatch,
          dims(f.rows(), f.cols()) + " * " + dims(s.rows(), s.cols()));
  require(s.rows() == s.cols(), ErrorCode::kDimensionMismatch, "basis must be square");
  const ZqMatrix prod = mat_mul(f, s);
  for (uint64_t v : prod.entries()) {
    if (v != 0) return false;
  }
  return full_column_rank(s);
}

namespace {

double gram_schmidt_norm_exact(const IntMatrix& s) {
  using boost::multiprecision::cpp_int;
  const size_t d = s.cols();
  std::vector<std::vector<cpp_int>> g(d, std::vector<cpp_int>(d));
  for (size_t i = 0; i < d; ++i) {
    for (size_t j = i; j < d; ++j) {
      cpp_int acc = 0;
      for (size_t r = 0; r < s.rows(); ++r) acc += cpp_int(s(r, i)) * s(r, j);
      g[i][j] = acc;
      g[j][i] = acc;
    }
  }
  // Fraction-free elimination: the k-th pivot is the k-th leading principal
  // minor D_k of the Gram matrix, and ||b~_k||^2 = D_k / D_{k-1}.
  cpp_int prev = 1;
  cpp_int best_num = 0;
  cpp_int best_den = 1;
  for (size_t k = 0; k < d; ++k) {
    const cpp_int pivot = g[k][k];
    require(pivot > 0, ErrorCode::kRankDeficient, "columns are linearly dependent");
    if (pivot * best_den > best_num * prev) {
      best_num = pivot;
      best_den = prev;
    }
    for (size_t i = k + 1; i < d; ++i) {
      for (size_t j = k + 1; j < d; ++j) {
        g[i][j] = (g[i][j] * pivot - g[i][k] * g[k][j]) / prev;
      }
    }
    prev = pivot;
  }
  // The ratio may exceed double's exponent range only for absurd inputs.
  using boost::multiprecision::cpp_rational;
  const cpp_rational ratio(best_num, best_den);
  return std::sqrt(ratio.convert_to<long double>());
}

double gram_schmidt_norm_float(const IntMatrix& s) {
  require(full_column_rank(s), ErrorCode::kRankDeficient, "columns are linearly dependent");
  using Mat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  Mat m(s.rows(), s.cols());
  for (size_t r = 0; r < s.rows(); ++r)
    for (size_t c = 0; c < s.cols(); ++c) m(r, c) = static_cast<long double>(s(r, c));
  Eigen::HouseholderQR<Mat> qr(m);
  const Mat& packed = qr.matrixQR();
  long double best = 0;
  for (size_t i = 0; i < s.cols(); ++i) best = std::max(best, std::abs(packed(i, i)));
  return static_cast<double>(best);
}

}  // namespace

double gram_schmidt_norm(const IntMatrix& s) {
  require(s.cols() > 0 && s.cols() <= s.rows(), ErrorCode::kRankDeficient,
          "need at most as many columns as rows");
  return s.cols() <= 64 ? gram_schmidt_norm_exact(s) : gram_schmidt_norm_float(s);
}

// ---------------------------------------------------------------------------

ModularSolver::ModularSolver(const ZqMatrix& a) : q_(a.modulus()), rows_(a.rows()), cols_(a.cols()) {
  // Gauss-Jordan on a copy to locate pivot columns.
  std::vector<uint64_t> w(a.entries().begin(), a.entries().end());
  auto at = [&](size_t r, size_t c) -> uint64_t& { return w[r * cols_ + c]; };
  size_t r = 0;
  for (size_t c = 0; c < cols_ && r < rows_; ++c) {
    size_t sel = r;
    while (sel < rows_ && at(sel, c) == 0) ++sel;
    if (sel == rows_) continue;
    for (size_t j = 0; j < cols_; ++j) std::swap(at(r, j), at(sel, j));
    const uint64_t inv = q_.inverse(at(r, c));
    for (size_t j = 0; j < cols_; ++j) at(r, j) = q_.mul(at(r, j), inv);
    for (size_t i = 0; i < rows_; ++i) {
      if (i == r || at(i, c) == 0) continue;
      const uint64_t f = at(i, c);
      for (size_t j = 0; j < cols_; ++j) at(i, j) = q_.sub(at(i, j), q_.mul(f, at(r, j)));
    }
    pivots_.push_back(c);
    ++r;
  }
  require(pivots_.size() == rows_, ErrorCode::kRankDeficient,
          "matrix has rank " + std::to_string(pivots_.size()) + " < " + std::to_string(rows_));

  // Invert the square submatrix on the pivot columns.
  const size_t n = rows_;
  std::vector<uint64_t> sq(n * 2 * n, 0);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) sq[i * 2 * n + j] = a(i, pivots_[j]);
    sq[i * 2 * n + n + i] = 1;
  }
  for (size_t c = 0; c < n; ++c) {
    size_t sel = c;
    while (sel < n && sq[sel * 2 * n + c] == 0) ++sel;
    require(sel < n, ErrorCode::kRankDeficient, "pivot block singular");
    for (size_t j = 0; j < 2 * n; ++j) std::swap(sq[c * 2 * n + j], sq[sel * 2 * n + j]);
    const uint64_t inv = q_.inverse(sq[c * 2 * n + c]);
    for (size_t j = 0; j < 2 * n; ++j) sq[c * 2 * n + j] = q_.mul(sq[c * 2 * n + j], inv);
    for (size_t i = 0; i < n; ++i) {
      if (i == c) continue;
      const uint64_t f = sq[i * 2 * n + c];
      if (f == 0) continue;
      for (size_t j = 0; j < 2 * n; ++j)
        sq[i * 2 * n + j] = q_.sub(sq[i * 2 * n + j], q_.mul(f, sq[c * 2 * n + j]));
    }
  }
  pivot_inverse_.resize(n * n);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) pivot_inverse_[i * n + j] = sq[i * 2 * n + n + j];
}

std::vector<int64_t> ModularSolver::solve(const ZqVector& u) const {
  require(u.dim() == rows_, ErrorCode::kDimensionMismatch, "target length");
  std::vector<int64_t> x(cols_, 0);
  for (size_t i = 0; i < rows_; ++i) {
    unsigned __int128 acc = 0;
    for (size_t j = 0; j < rows_; ++j) {
      acc += static_cast<unsigned __int128>(pivot_inverse_[i * rows_ + j]) * u[j];
    }
    x[pivots_[i]] = center_rep(q_.reduce_wide(acc), q_);
  }
  return x;
}

}  // namespace ibeetfa
