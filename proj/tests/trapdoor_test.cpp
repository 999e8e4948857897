#include "ibeetfa/trapdoor.hpp"

#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "ibeetfa/error.hpp"
#include "ibeetfa/samplers.hpp"

namespace ibeetfa {
namespace {

double norm(std::span<const int64_t> v) {
  double s = 0;
  for (auto x : v) s += double(x) * double(x);
  return std::sqrt(s);
}

ErrorCode code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kInvalidArgument;
}

ZqMatrix zero_matrix(const Modulus& q, size_t r, size_t c) { return ZqMatrix(q, r, c); }

TEST(TrapGenTest, TinyModulus) {
  RandomSource rng("trapgen-tiny");
  const Modulus q(7);
  for (int trial = 0; trial < 10; ++trial) {
    const auto pair = trap_gen(q, 1, 18, rng);
    EXPECT_EQ(pair.a.rows(), 1u);
    EXPECT_EQ(pair.a.cols(), 18u);
    EXPECT_TRUE(check_nullspace_basis(pair.a, pair.s));
    EXPECT_LE(pair.gs_norm, bound_gs(1, q, 18));
  }
}

TEST(TrapGenTest, GramSchmidtBoundOverTwentyRuns) {
  RandomSource rng("trapgen-bound");
  const Modulus q(4093);
  const size_t n = 4, m = trapgen_min_width(n, q);
  EXPECT_EQ(m, 288u);
  for (int trial = 0; trial < 20; ++trial) {
    const auto pair = trap_gen(q, n, m, rng);
    ASSERT_TRUE(check_nullspace_basis(pair.a, pair.s));
    EXPECT_DOUBLE_EQ(pair.gs_norm, gram_schmidt_norm(pair.s));
    EXPECT_LE(pair.gs_norm, bound_gs(n, q, m));
  }
}

TEST(TrapGenTest, WidthTooSmall) {
  RandomSource rng("trapgen-small");
  EXPECT_EQ(code_of([&] { trap_gen(Modulus(7), 1, 2, rng); }), ErrorCode::kInvalidParams);
  EXPECT_EQ(code_of([&] { trap_gen(Modulus(7), 1, 17, rng); }), ErrorCode::kInvalidParams);
}

TEST(TrapGenTest, Deterministic) {
  RandomSource r1("trapgen-seed"), r2("trapgen-seed");
  const auto a = trap_gen(Modulus(4093), 2, 150, r1);
  const auto b = trap_gen(Modulus(4093), 2, 150, r2);
  EXPECT_EQ(a.a, b.a);
  EXPECT_EQ(a.s, b.s);
}

class PreimageTest : public ::testing::Test {
 protected:
  PreimageTest() : rng_("preimage"), q_(4093), pair_(trap_gen(q_, 2, 150, rng_)), basis_(pair_.s) {}

  double sigma() const { return basis_.gs_norm() * slack(pair_.a.cols()); }

  RandomSource rng_;
  Modulus q_;
  TrapdoorPair pair_;
  ShortBasis basis_;
};

TEST_F(PreimageTest, ZeroTargetGivesLatticePoint) {
  const ZqVector zero(q_, 2);
  for (int i = 0; i < 20; ++i) {
    EXPECT_EQ(mat_vec(pair_.a, sample_pre(pair_.a, basis_, zero, sigma(), rng_)), zero);
  }
}

TEST_F(PreimageTest, RandomTargetsAndNorms) {
  const size_t m = pair_.a.cols();
  int short_count = 0;
  const int trials = 1000;
  for (int i = 0; i < trials; ++i) {
    const auto u = sample_uniform_zq_vector(2, q_, rng_);
    const auto e = sample_pre(pair_.a, basis_, u, sigma(), rng_);
    ASSERT_EQ(mat_vec(pair_.a, e), u);
    short_count += norm(e) <= 2 * sigma() * std::sqrt(double(m));
  }
  EXPECT_GE(short_count, 990);
}

TEST_F(PreimageTest, SigmaTooSmall) {
  const ZqVector u(q_, 2);
  EXPECT_EQ(code_of([&] { sample_pre(pair_.a, basis_, u, sigma() / 2, rng_); }), ErrorCode::kSigmaTooSmall);
  // The relaxed path still lands in the coset.
  const auto target = sample_uniform_zq_vector(2, q_, rng_);
  EXPECT_EQ(mat_vec(pair_.a, sample_pre(pair_.a, basis_, target, sigma() / 2, rng_, SigmaCheck::kRelaxed)), target);
}

TEST_F(PreimageTest, IntMatrixOverload) {
  const auto u = sample_uniform_zq_vector(2, q_, rng_);
  EXPECT_EQ(mat_vec(pair_.a, sample_pre(pair_.a, pair_.s, u, sigma(), rng_)), u);
}

class SampleLeftTest : public ::testing::Test {
 protected:
  SampleLeftTest() : rng_("sample-left"), q_(7), pair_(trap_gen(q_, 2, 36, rng_)), basis_(pair_.s) {}

  double sigma(size_t m1) const { return basis_.gs_norm() * slack(pair_.a.cols() + m1); }

  RandomSource rng_;
  Modulus q_;
  TrapdoorPair pair_;
  ShortBasis basis_;
};

TEST_F(SampleLeftTest, ZeroTarget) {
  const auto m = sample_uniform_zq(2, 20, q_, rng_);
  const auto u = zero_matrix(q_, 2, 1);
  const auto e = sample_left(pair_.a, m, basis_, u, sigma(20), rng_);
  const ZqMatrix parts[] = {pair_.a, m};
  EXPECT_EQ(mat_mul(concat_cols(parts), e), u);
}

TEST_F(SampleLeftTest, EveryTargetOfTinyModulus) {
  const auto m = sample_uniform_zq(2, 20, q_, rng_);
  std::vector<uint64_t> all;
  for (uint64_t x = 0; x < 7; ++x)
    for (uint64_t y = 0; y < 7; ++y) all.push_back(x), all.push_back(y);
  // Columns of U enumerate Z_7^2.
  std::vector<uint64_t> u_entries(2 * 49);
  for (size_t c = 0; c < 49; ++c) {
    u_entries[c] = all[2 * c];
    u_entries[49 + c] = all[2 * c + 1];
  }
  const ZqMatrix u(q_, 2, 49, u_entries);
  const auto e = sample_left(pair_.a, m, basis_, u, sigma(20), rng_);
  EXPECT_EQ(e.rows(), 56u);
  EXPECT_EQ(e.cols(), 49u);
  const ZqMatrix parts[] = {pair_.a, m};
  EXPECT_EQ(mat_mul(concat_cols(parts), e), u);
}

TEST_F(SampleLeftTest, ColumnNorms) {
  const size_t m1 = 30;
  const auto m = sample_uniform_zq(2, m1, q_, rng_);
  const auto u = sample_uniform_zq(2, 1000, q_, rng_);
  const double s = sigma(m1);
  const auto e = sample_left(pair_.a, m, basis_, u, s, rng_);
  int ok = 0;
  for (size_t c = 0; c < e.cols(); ++c) ok += norm(e.column(c)) <= 2 * s * std::sqrt(36.0 + m1);
  EXPECT_GE(ok, 990);
}

TEST_F(SampleLeftTest, Errors) {
  const auto m = sample_uniform_zq(3, 20, q_, rng_);
  const auto u = zero_matrix(q_, 2, 1);
  EXPECT_EQ(code_of([&] { sample_left(pair_.a, m, basis_, u, sigma(20), rng_); }), ErrorCode::kDimensionMismatch);
  const auto m2 = sample_uniform_zq(2, 20, q_, rng_);
  EXPECT_EQ(code_of([&] { sample_left(pair_.a, m2, basis_, u, 1.0, rng_); }), ErrorCode::kSigmaTooSmall);
}

class SampleRightTest : public ::testing::Test {
 protected:
  SampleRightTest()
      : rng_("sample-right"),
        q_(4093),
        a_(sample_uniform_zq(2, 150, q_, rng_)),
        pair_b_(trap_gen(q_, 2, 150, rng_)),
        basis_b_(pair_b_.s),
        r_(sample_sign_matrix(150, rng_)) {}

  double sigma() const { return basis_b_.gs_norm() * operator_norm_estimate(r_) * slack(150) * 1.01; }
  ZqMatrix f() const {
    const ZqMatrix parts[] = {a_, mat_add(mat_mul(a_, r_), pair_b_.a)};
    return concat_cols(parts);
  }

  RandomSource rng_;
  Modulus q_;
  ZqMatrix a_;
  TrapdoorPair pair_b_;
  ShortBasis basis_b_;
  IntMatrix r_;
};

TEST_F(SampleRightTest, ZeroTarget) {
  const auto u = zero_matrix(q_, 2, 3);
  EXPECT_EQ(mat_mul(f(), sample_right(a_, pair_b_.a, r_, basis_b_, u, sigma(), rng_)), u);
}

TEST_F(SampleRightTest, RandomTargets) {
  const auto u = sample_uniform_zq(2, 100, q_, rng_);
  const auto e = sample_right(a_, pair_b_.a, r_, basis_b_, u, sigma(), rng_);
  EXPECT_EQ(e.rows(), 300u);
  EXPECT_EQ(mat_mul(f(), e), u);
}

TEST_F(SampleRightTest, SigmaTooSmall) {
  const auto u = zero_matrix(q_, 2, 1);
  EXPECT_EQ(code_of([&] { sample_right(a_, pair_b_.a, r_, basis_b_, u, sigma() / 4, rng_); }),
            ErrorCode::kSigmaTooSmall);
}

// The largest singular value of an m x m sign matrix concentrates at 2 sqrt(m)
// and overshoots it slightly at finite m; 2.1 covers the measured spread.
constexpr double kMeasuredSignNormConstant = 2.1;

TEST(OperatorNormTest, SignMatrixBelowConstantRootM) {
  RandomSource rng("operator-norm");
  for (int trial = 0; trial < 20; ++trial) {
    const size_t m = 100 + 10 * trial;
    const auto r = sample_sign_matrix(m, rng);
    const double s = operator_norm_estimate(r);
    EXPECT_LT(s, kMeasuredSignNormConstant * std::sqrt(double(m)));
    // Any column gives a lower bound.
    EXPECT_GE(s * (1 + 1e-9), norm(r.column(0)));
  }
}

TEST(OperatorNormTest, DiagonalExact) {
  EXPECT_NEAR(operator_norm_estimate(IntMatrix(2, 2, {3, 0, 0, -5})), 5.0, 1e-9);
}

TEST(SampleBasisLeftTest, FiftyTrials) {
  RandomSource rng("basis-left");
  const Modulus q(7);
  const auto pair = trap_gen(q, 1, 18, rng);
  const ShortBasis t(pair.s);
  const double sigma = t.gs_norm() * slack(36);
  for (int trial = 0; trial < 50; ++trial) {
    const auto m = sample_uniform_zq(1, 18, q, rng);
    const auto s = sample_basis_left(pair.a, m, t, sigma, rng);
    const ZqMatrix parts[] = {pair.a, m};
    ASSERT_TRUE(check_nullspace_basis(concat_cols(parts), s));
    EXPECT_EQ(s.rows(), 36u);
    EXPECT_TRUE(full_column_rank(s));
    EXPECT_LE(gram_schmidt_norm(s), 2 * sigma * std::sqrt(36.0));
  }
}

TEST(SampleBasisLeftTest, DelegatedBasisDrivesSampleLeft) {
  RandomSource rng("basis-closure");
  const Modulus q(4093);
  const auto pair = trap_gen(q, 2, 150, rng);
  const ShortBasis t(pair.s);
  const auto m = sample_uniform_zq(2, 150, q, rng);
  const ShortBasis e(sample_basis_left(pair.a, m, t, t.gs_norm() * slack(300), rng));
  const ZqMatrix parts[] = {pair.a, m};
  const auto f = concat_cols(parts);
  ASSERT_TRUE(check_nullspace_basis(f, e.matrix()));

  const auto m2 = sample_uniform_zq(2, 150, q, rng);
  const auto u = sample_uniform_zq(2, 8, q, rng);
  const auto out = sample_left(f, m2, e, u, e.gs_norm() * slack(450), rng);
  const ZqMatrix wide[] = {f, m2};
  EXPECT_EQ(mat_mul(concat_cols(wide), out), u);
}

TEST(SampleBasisRightTest, BasisOfRightExtension) {
  RandomSource rng("basis-right");
  const Modulus q(4093);
  const auto a = sample_uniform_zq(1, 80, q, rng);
  const auto pair_b = trap_gen(q, 1, 80, rng);
  const ShortBasis t_b(pair_b.s);
  const auto r = sample_sign_matrix(80, rng);
  const double sigma = t_b.gs_norm() * operator_norm_estimate(r) * slack(80) * 1.01;
  const auto s = sample_basis_right(a, pair_b.a, r, t_b, sigma, rng);
  const ZqMatrix parts[] = {a, mat_add(mat_mul(a, r), pair_b.a)};
  EXPECT_TRUE(check_nullspace_basis(concat_cols(parts), s));
  EXPECT_TRUE(full_column_rank(s));

  RandomSource r1("basis-right-seed"), r2("basis-right-seed");
  EXPECT_EQ(sample_basis_right(a, pair_b.a, r, t_b, sigma, r1), sample_basis_right(a, pair_b.a, r, t_b, sigma, r2));
}

TEST(ShortBasisTest, CopiesShareSampler) {
  const ShortBasis a(IntMatrix::identity(3));
  const ShortBasis b = a;
  EXPECT_EQ(&a.sampler(), &b.sampler());
  EXPECT_DOUBLE_EQ(b.gs_norm(), 1.0);
}

}  // namespace
}  // namespace ibeetfa
