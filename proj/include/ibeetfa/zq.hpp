#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ibeetfa {

// An odd prime modulus q with 3 <= q < 2^62.
class Modulus {
 public:
  explicit Modulus(uint64_t q);

  uint64_t value() const { return q_; }
  uint64_t half() const { return q_ / 2; }
  uint64_t quarter() const { return q_ / 4; }
  // Bits in the binary expansion of q, i.e. ceil(log2 q) for non-powers of two.
  unsigned bits() const;

  uint64_t reduce(int64_t x) const {
    int64_t r = x % static_cast<int64_t>(q_);
    return static_cast<uint64_t>(r < 0 ? r + static_cast<int64_t>(q_) : r);
  }
  uint64_t reduce_wide(unsigned __int128 x) const {
    return static_cast<uint64_t>(x % q_);
  }
  uint64_t add(uint64_t a, uint64_t b) const {
    uint64_t s = a + b;
    return s >= q_ ? s - q_ : s;
  }
  uint64_t sub(uint64_t a, uint64_t b) const {
    return a >= b ? a - b : a + q_ - b;
  }
  uint64_t mul(uint64_t a, uint64_t b) const {
    return static_cast<uint64_t>(static_cast<unsigned __int128>(a) * b % q_);
  }
  uint64_t pow(uint64_t base, uint64_t exp) const;
  uint64_t inverse(uint64_t a) const;

  friend bool operator==(const Modulus&, const Modulus&) = default;

 private:
  uint64_t q_;
};

bool is_prime(uint64_t n);

// Dense row-major matrix of residues in [0, q).
class ZqMatrix {
 public:
  ZqMatrix(Modulus q, size_t rows, size_t cols);
  ZqMatrix(Modulus q, size_t rows, size_t cols, std::vector<uint64_t> entries);

  const Modulus& modulus() const { return q_; }
  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  size_t size() const { return data_.size(); }

  uint64_t operator()(size_t r, size_t c) const { return data_[r * cols_ + c]; }
  void set(size_t r, size_t c, uint64_t v) { data_[r * cols_ + c] = v % q_.value(); }
  std::span<const uint64_t> row(size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const uint64_t> entries() const { return data_; }

  friend bool operator==(const ZqMatrix&, const ZqMatrix&) = default;

 private:
  Modulus q_;
  size_t rows_;
  size_t cols_;
  std::vector<uint64_t> data_;
};

// Dense row-major matrix of signed integers. max_abs() is computed at
// construction and is exact; the entries cannot be modified afterwards.
class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(size_t rows, size_t cols, std::vector<int64_t> entries);
  static IntMatrix identity(size_t dim);
  static IntMatrix from_columns(size_t rows, std::span<const std::vector<int64_t>> columns);

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  size_t size() const { return data_.size(); }
  int64_t max_abs() const { return max_abs_; }

  int64_t operator()(size_t r, size_t c) const { return data_[r * cols_ + c]; }
  std::span<const int64_t> row(size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const int64_t> entries() const { return data_; }
  std::vector<int64_t> column(size_t c) const;
  IntMatrix transpose() const;

  friend bool operator==(const IntMatrix& a, const IntMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  size_t rows_ = 0;
  size_t cols_ = 0;
  std::vector<int64_t> data_;
  int64_t max_abs_ = 0;
};

class ZqVector {
 public:
  ZqVector(Modulus q, size_t dim);
  ZqVector(Modulus q, std::vector<uint64_t> entries);

  const Modulus& modulus() const { return q_; }
  size_t dim() const { return data_.size(); }
  uint64_t operator[](size_t i) const { return data_[i]; }
  void set(size_t i, uint64_t v) { data_[i] = v % q_.value(); }
  std::span<const uint64_t> entries() const { return data_; }
  // Contiguous sub-range [offset, offset + len).
  ZqVector slice(size_t offset, size_t len) const;

  friend bool operator==(const ZqVector&, const ZqVector&) = default;

 private:
  Modulus q_;
  std::vector<uint64_t> data_;
};

ZqMatrix mat_mul(const ZqMatrix& a, const ZqMatrix& b);
ZqMatrix mat_mul(const ZqMatrix& a, const IntMatrix& b);
ZqMatrix mat_add(const ZqMatrix& a, const ZqMatrix& b);
// a * x (mod q) for an integer column vector x.
ZqVector mat_vec(const ZqMatrix& a, std::span<const int64_t> x);
// a^T * s (mod q).
ZqVector transpose_mul(const ZqMatrix& a, const ZqVector& s);
// m^T * y (mod q) for an integer matrix m.
ZqVector transpose_mul(const IntMatrix& m, const ZqVector& y);
ZqVector vec_add(const ZqVector& a, const ZqVector& b);
ZqVector vec_sub(const ZqVector& a, const ZqVector& b);
ZqVector concat(std::span<const ZqVector> parts);

ZqMatrix concat_cols(std::span<const ZqMatrix> parts);
ZqMatrix column_block(const ZqMatrix& a, size_t first, size_t count);
ZqVector column_of(const ZqMatrix& a, size_t c);

// Representative in (-q/2, q/2].
int64_t center_rep(uint64_t residue, const Modulus& q);
std::vector<int64_t> center_rep(const ZqVector& v);
IntMatrix center_rep(const ZqMatrix& a);
ZqMatrix reduce(const IntMatrix& a, const Modulus& q);

// True iff f * s == 0 (mod q) and s is nonsingular over the rationals.
bool check_nullspace_basis(const ZqMatrix& f, const IntMatrix& s);
// Rank over the rationals equals the column count. Decided by elimination
// modulo word-size primes: a full rank modulo any prime implies full rational
// rank; a false "singular" needs det divisible by three distinct ~2^21 primes.
bool full_column_rank(const IntMatrix& s);

// max_i ||b~_i|| over the Gram-Schmidt orthogonalisation of the columns of s,
// in column order. Exact (Gram determinants over big integers) up to
// dimension 64, long double Householder QR above.
double gram_schmidt_norm(const IntMatrix& s);

// Solves a * x == u (mod q) for a wide matrix of full row rank. Solutions are
// supported on the pivot columns only and returned in centered form.
class ModularSolver {
 public:
  explicit ModularSolver(const ZqMatrix& a);

  std::vector<int64_t> solve(const ZqVector& u) const;
  size_t cols() const { return cols_; }

 private:
  Modulus q_;
  size_t rows_;
  size_t cols_;
  std::vector<size_t> pivots_;
  std::vector<uint64_t> pivot_inverse_;  // rows x rows, row-major
};

inline constexpr uint64_t kRankPrimes[] = {2097143, 2097133, 2097131};

// Greedy independence test modulo a word-size prime. try_add() keeps a vector
// iff it is independent of those already kept.
class IncrementalRank {
 public:
  explicit IncrementalRank(size_t dim, uint64_t prime = kRankPrimes[0]);

  bool try_add(std::span<const int64_t> v);
  size_t rank() const { return rows_.size(); }

 private:
  size_t dim_;
  uint64_t p_;
  std::vector<std::vector<uint64_t>> rows_;  // echelon rows, leading entry 1
  std::vector<size_t> lead_;
};

}  // namespace ibeetfa
