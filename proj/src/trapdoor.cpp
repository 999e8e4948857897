#include "ibeetfa/trapdoor.hpp"

#include <cmath>
#include <string>

#include "ibeetfa/error.hpp"

namespace ibeetfa {

namespace {

constexpr int kTrapGenAttempts = 8;
constexpr int kPowerIterations = 50;

// Basis of the kernel lattice of g = (1, 2, ..., 2^{k-1}) modulo q.
std::vector<int64_t> gadget_basis(const Modulus& q, unsigned k) {
  std::vector<int64_t> s(k * k, 0);
  for (unsigned j = 0; j + 1 < k; ++j) {
    s[j * k + j] = 2;
    s[(j + 1) * k + j] = -1;
  }
  for (unsigned i = 0; i < k; ++i) s[i * k + (k - 1)] = static_cast<int64_t>((q.value() >> i) & 1);
  return s;
}

void check_sigma(double sigma, double gs, double factor, const char* what) {
  if (!(sigma >= gs * factor)) {
    throw Error(ErrorCode::kSigmaTooSmall,
                std::string(what) + ": sigma " + std::to_string(sigma) + " < " +
                    std::to_string(gs * factor));
  }
}

std::vector<double> to_double(std::span<const int64_t> v) {
  return std::vector<double>(v.begin(), v.end());
}

IntMatrix greedy_basis(size_t dim, size_t budget, const auto& draw) {
  IncrementalRank rank(dim);
  std::vector<std::vector<int64_t>> kept;
  kept.reserve(dim);
  for (size_t tries = 0; tries < budget && kept.size() < dim; ++tries) {
    std::vector<int64_t> v = draw();
    if (rank.try_add(v)) kept.push_back(std::move(v));
  }
  if (kept.size() < dim) {
    throw Error(ErrorCode::kSamplingFailed,
                "only " + std::to_string(kept.size()) + " of " + std::to_string(dim) +
                    " independent lattice vectors after " + std::to_string(budget) + " draws");
  }
  return IntMatrix::from_columns(dim, kept);
}

size_t basis_budget(size_t dim) { return dim + dim / 4 + 64; }

ZqVector negate(const ZqVector& v) {
  return vec_sub(ZqVector(v.modulus(), v.dim()), v);
}

// Basis of the kernel lattice of (A | A R + B) assembled from T_B:
// columns (-R t; t) for t in T_B, then (e_i - R x_i; x_i) with B x_i == -a_i.
// ||T~_F|| <= (s_1(R) + 1) ||T~_B||.
IntMatrix extend_right(const ZqMatrix& a, const ZqMatrix& b, const IntMatrix& r,
                       const ShortBasis& t_b, RandomSource& rng) {
  const size_t m = a.cols();
  const size_t k = b.cols();
  const IntMatrix& tb = t_b.matrix();
  PreimageSampler pre_b(b, t_b);
  const double sigma_x = t_b.gs_norm() * slack(k);
  std::vector<std::vector<int64_t>> cols;
  cols.reserve(m + k);
  auto r_times = [&](std::span<const int64_t> x) {
    std::vector<int64_t> out(m, 0);
    for (size_t i = 0; i < m; ++i) {
      auto row = r.row(i);
      int64_t acc = 0;
      for (size_t j = 0; j < k; ++j) acc += row[j] * x[j];
      out[i] = acc;
    }
    return out;
  };
  for (size_t c = 0; c < k; ++c) {
    const std::vector<int64_t> t = tb.column(c);
    std::vector<int64_t> top = r_times(t);
    std::vector<int64_t> col(m + k);
    for (size_t i = 0; i < m; ++i) col[i] = -top[i];
    for (size_t i = 0; i < k; ++i) col[m + i] = t[i];
    cols.push_back(std::move(col));
  }
  for (size_t c = 0; c < m; ++c) {
    const std::vector<int64_t> x = pre_b.sample(negate(column_of(a, c)), sigma_x, rng);
    std::vector<int64_t> top = r_times(x);
    std::vector<int64_t> col(m + k);
    for (size_t i = 0; i < m; ++i) col[i] = (i == c ? 1 : 0) - top[i];
    for (size_t i = 0; i < k; ++i) col[m + i] = x[i];
    cols.push_back(std::move(col));
  }
  return IntMatrix::from_columns(m + k, cols);
}

ZqMatrix right_matrix(const ZqMatrix& a, const ZqMatrix& b, const IntMatrix& r) {
  if (r.rows() != a.cols() || r.cols() != b.cols() || a.rows() != b.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "sample_right: A, B, R dimensions disagree");
  }
  const ZqMatrix parts[] = {a, mat_add(mat_mul(a, r), b)};
  return concat_cols(parts);
}

}  // namespace

size_t trapgen_min_width(size_t n, const Modulus& q) { return 6 * n * q.bits(); }

double bound_gs(size_t n, const Modulus& q, size_t m) {
  const double nk = static_cast<double>(n * q.bits());
  const double mbar = static_cast<double>(m) - nk;
  return std::sqrt(5.0) * (0.8 * (std::sqrt(std::max(mbar, 0.0)) + std::sqrt(nk)) + 1.0);
}

TrapdoorPair trap_gen(const Modulus& q, size_t n, size_t m, RandomSource& rng) {
  if (n == 0) throw Error(ErrorCode::kInvalidParams, "trap_gen: n must be positive");
  if (m < trapgen_min_width(n, q)) {
    throw Error(ErrorCode::kInvalidParams,
                "trap_gen: constraint m >= 6 n ceil(log2 q) violated (m = " + std::to_string(m) +
                    ", need " + std::to_string(trapgen_min_width(n, q)) + ")");
  }
  const unsigned k = q.bits();
  const size_t nk = n * k;
  const size_t mbar = m - nk;
  const std::vector<int64_t> sk = gadget_basis(q, k);

  for (int attempt = 0; attempt < kTrapGenAttempts; ++attempt) {
    const ZqMatrix abar = sample_uniform_zq(n, mbar, q, rng);
    std::vector<int64_t> rbar(mbar * nk);
    for (auto& v : rbar) v = rng.bit() ? (rng.bit() ? 1 : -1) : 0;

    // A = [Abar | G - Abar R].
    std::vector<uint64_t> a(n * m);
    const ZqMatrix abar_r = mat_mul(abar, IntMatrix(mbar, nk, rbar));
    for (size_t i = 0; i < n; ++i) {
      for (size_t c = 0; c < mbar; ++c) a[i * m + c] = abar(i, c);
      for (size_t c = 0; c < nk; ++c) {
        uint64_t g = 0;
        if (c / k == i) g = q.reduce(int64_t{1} << (c % k));
        a[i * m + mbar + c] = q.sub(g, abar_r(i, c));
      }
    }

    // W = G^{-1}(-Abar): bit decomposition, nk x mbar.
    std::vector<int64_t> w(nk * mbar);
    for (size_t i = 0; i < n; ++i) {
      for (size_t c = 0; c < mbar; ++c) {
        const uint64_t v = q.sub(0, abar(i, c));
        for (unsigned bit = 0; bit < k; ++bit) w[(i * k + bit) * mbar + c] = static_cast<int64_t>((v >> bit) & 1);
      }
    }
    // S_G = I_n (x) S_k, sparse in practice; apply blockwise.
    auto sg = [&](size_t row, size_t col) -> int64_t {
      if (row / k != col / k) return 0;
      return sk[(row % k) * k + (col % k)];
    };

    // S = [[R S_G, I + R W], [S_G, W]], gadget-derived columns first.
    std::vector<int64_t> s(m * m, 0);
    for (size_t r = 0; r < mbar; ++r) {
      const int64_t* rrow = rbar.data() + r * nk;
      for (size_t c = 0; c < nk; ++c) {
        int64_t acc = 0;
        const size_t blk = c / k;
        for (size_t j = blk * k; j < (blk + 1) * k; ++j) acc += rrow[j] * sg(j, c);
        s[r * m + c] = acc;
      }
      for (size_t c = 0; c < mbar; ++c) {
        int64_t acc = (r == c) ? 1 : 0;
        for (size_t j = 0; j < nk; ++j) {
          if (rrow[j] != 0) acc += rrow[j] * w[j * mbar + c];
        }
        s[r * m + nk + c] = acc;
      }
    }
    for (size_t r = 0; r < nk; ++r) {
      for (size_t c = 0; c < nk; ++c) s[(mbar + r) * m + c] = sg(r, c);
      for (size_t c = 0; c < mbar; ++c) s[(mbar + r) * m + nk + c] = w[r * mbar + c];
    }

    TrapdoorPair pair{ZqMatrix(q, n, m, std::move(a)), IntMatrix(m, m, std::move(s)), 0.0};
    pair.gs_norm = gram_schmidt_norm(pair.s);
    if (pair.gs_norm <= bound_gs(n, q, m)) return pair;
  }
  throw Error(ErrorCode::kSamplingFailed, "trap_gen: Gram-Schmidt bound not met after retries");
}

// ---------------------------------------------------------------------------

ShortBasis::ShortBasis(IntMatrix basis) : basis_(std::move(basis)), cache_(std::make_shared<Cache>()) {}

const LatticeGaussian& ShortBasis::sampler() const {
  if (!cache_) throw Error(ErrorCode::kInvalidArgument, "empty basis");
  std::call_once(cache_->once, [this] { cache_->sampler = std::make_unique<LatticeGaussian>(basis_); });
  return *cache_->sampler;
}

PreimageSampler::PreimageSampler(const ZqMatrix& a, const ShortBasis& t)
    : a_(a), t_(t), solver_(a) {
  if (t.matrix().rows() != a.cols() || t.matrix().cols() != a.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "trapdoor basis is " + std::to_string(t.matrix().rows()) + "x" +
                    std::to_string(t.matrix().cols()) + " for a matrix with " +
                    std::to_string(a.cols()) + " columns");
  }
}

std::vector<int64_t> PreimageSampler::sample(const ZqVector& u, double sigma, RandomSource& rng) const {
  const std::vector<int64_t> x0 = solver_.solve(u);
  const std::vector<double> center = to_double(x0);
  const std::vector<int64_t> v = t_.sampler().sample(sigma, center, rng);
  std::vector<int64_t> e(x0.size());
  for (size_t i = 0; i < e.size(); ++i) e[i] = x0[i] - v[i];
  return e;
}

std::vector<int64_t> sample_pre(const ZqMatrix& a, const ShortBasis& t, const ZqVector& u,
                                double sigma, RandomSource& rng, SigmaCheck check) {
  PreimageSampler pre(a, t);
  if (check == SigmaCheck::kEnforce) check_sigma(sigma, t.gs_norm(), slack(a.cols()), "sample_pre");
  return pre.sample(u, sigma, rng);
}

std::vector<int64_t> sample_pre(const ZqMatrix& a, const IntMatrix& t, const ZqVector& u,
                                double sigma, RandomSource& rng, SigmaCheck check) {
  return sample_pre(a, ShortBasis(t), u, sigma, rng, check);
}

IntMatrix sample_left(const ZqMatrix& a, const ZqMatrix& m, const ShortBasis& t_a,
                      const ZqMatrix& u, double sigma, RandomSource& rng, SigmaCheck check) {
  if (a.rows() != m.rows() || a.rows() != u.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "sample_left: A, M, U row counts disagree");
  }
  PreimageSampler pre(a, t_a);
  const size_t k = a.cols();
  const size_t m1 = m.cols();
  if (check == SigmaCheck::kEnforce) check_sigma(sigma, t_a.gs_norm(), slack(k + m1), "sample_left");
  std::vector<std::vector<int64_t>> cols;
  cols.reserve(u.cols());
  for (size_t j = 0; j < u.cols(); ++j) {
    std::vector<int64_t> e2(m1);
    for (auto& x : e2) x = sample_z_gaussian(sigma, 0.0, rng);
    const ZqVector target = vec_sub(column_of(u, j), mat_vec(m, e2));
    std::vector<int64_t> col = pre.sample(target, sigma, rng);
    col.insert(col.end(), e2.begin(), e2.end());
    cols.push_back(std::move(col));
  }
  return IntMatrix::from_columns(k + m1, cols);
}

double operator_norm_estimate(const IntMatrix& r) {
  if (r.size() == 0) return 0.0;
  RandomSource rng(std::string_view("operator-norm-power-iteration"));
  std::vector<double> x(r.cols());
  for (auto& v : x) v = rng.normal();
  double estimate = 0.0;
  std::vector<double> y(r.rows());
  for (int it = 0; it < kPowerIterations; ++it) {
    double nx = 0.0;
    for (double v : x) nx += v * v;
    nx = std::sqrt(nx);
    if (nx == 0.0) return 0.0;
    for (auto& v : x) v /= nx;
    // y = R x, then x = R^T y.
    double ny = 0.0;
    for (size_t i = 0; i < r.rows(); ++i) {
      auto row = r.row(i);
      double acc = 0.0;
      for (size_t j = 0; j < row.size(); ++j) acc += static_cast<double>(row[j]) * x[j];
      y[i] = acc;
      ny += acc * acc;
    }
    estimate = std::sqrt(ny);
    std::fill(x.begin(), x.end(), 0.0);
    for (size_t i = 0; i < r.rows(); ++i) {
      auto row = r.row(i);
      for (size_t j = 0; j < row.size(); ++j) x[j] += static_cast<double>(row[j]) * y[i];
    }
  }
  return estimate;
}

IntMatrix sample_right(const ZqMatrix& a, const ZqMatrix& b, const IntMatrix& r,
                       const ShortBasis& t_b, const ZqMatrix& u, double sigma, RandomSource& rng) {
  const ZqMatrix f = right_matrix(a, b, r);
  if (u.rows() != f.rows()) throw Error(ErrorCode::kDimensionMismatch, "sample_right: U row count");
  check_sigma(sigma, t_b.gs_norm(), operator_norm_estimate(r) * slack(a.cols()), "sample_right");
  const ShortBasis t_f(extend_right(a, b, r, t_b, rng));
  PreimageSampler pre(f, t_f);
  std::vector<std::vector<int64_t>> cols;
  for (size_t j = 0; j < u.cols(); ++j) cols.push_back(pre.sample(column_of(u, j), sigma, rng));
  return IntMatrix::from_columns(f.cols(), cols);
}

IntMatrix sample_basis_left(const ZqMatrix& a, const ZqMatrix& m, const ShortBasis& t_a,
                            double sigma, RandomSource& rng) {
  if (a.rows() != m.rows()) throw Error(ErrorCode::kDimensionMismatch, "sample_basis_left: row counts");
  PreimageSampler pre(a, t_a);
  const size_t dim = a.cols() + m.cols();
  check_sigma(sigma, t_a.gs_norm(), slack(dim), "sample_basis_left");
  const ZqVector zero(a.modulus(), a.rows());
  return greedy_basis(dim, basis_budget(dim), [&] {
    std::vector<int64_t> e2(m.cols());
    for (auto& x : e2) x = sample_z_gaussian(sigma, 0.0, rng);
    std::vector<int64_t> col = pre.sample(vec_sub(zero, mat_vec(m, e2)), sigma, rng);
    col.insert(col.end(), e2.begin(), e2.end());
    return col;
  });
}

IntMatrix sample_basis_right(const ZqMatrix& a, const ZqMatrix& b, const IntMatrix& r,
                             const ShortBasis& t_b, double sigma, RandomSource& rng) {
  const ZqMatrix f = right_matrix(a, b, r);
  check_sigma(sigma, t_b.gs_norm(), operator_norm_estimate(r) * slack(a.cols()), "sample_basis_right");
  const ShortBasis t_f(extend_right(a, b, r, t_b, rng));
  PreimageSampler pre(f, t_f);
  const ZqVector zero(a.modulus(), a.rows());
  const size_t dim = f.cols();
  return greedy_basis(dim, basis_budget(dim), [&] { return pre.sample(zero, sigma, rng); });
}

}  // namespace ibeetfa
