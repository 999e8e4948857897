#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <vector>

#include "ibeetfa/random.hpp"
#include "ibeetfa/samplers.hpp"
#include "ibeetfa/zq.hpp"

namespace ibeetfa {

// A matrix A together with a short basis S of its q-ary kernel lattice.
struct TrapdoorPair {
  ZqMatrix a;
  IntMatrix s;
  double gs_norm;  // gram_schmidt_norm(s)
};

// Smallest width accepted by trap_gen: 6 * n * ceil(log2 q).
size_t trapgen_min_width(size_t n, const Modulus& q);

// Declared upper bound on the Gram-Schmidt norm of trap_gen output:
// sqrt(5) * (0.8 * (sqrt(m - nk) + sqrt(nk)) + 1), k = ceil(log2 q). The
// gadget basis has ||S~_k|| <= sqrt(5) and the random block R has
// s_1(R) ~ 0.71 (sqrt(m - nk) + sqrt(nk)).
double bound_gs(size_t n, const Modulus& q, size_t m);

// Gadget trapdoor: A = [Abar | G - Abar R] with R in {-1,0,1}, converted to
// an explicit basis of the kernel lattice of A.
TrapdoorPair trap_gen(const Modulus& q, size_t n, size_t m, RandomSource& rng);

// A lattice basis whose randomized nearest-plane sampler is built on first
// use and shared between copies.
class ShortBasis {
 public:
  ShortBasis() = default;
  explicit ShortBasis(IntMatrix basis);

  const IntMatrix& matrix() const { return basis_; }
  size_t dim() const { return basis_.cols(); }
  const LatticeGaussian& sampler() const;
  double gs_norm() const { return sampler().gs_norm(); }

  friend bool operator==(const ShortBasis& a, const ShortBasis& b) { return a.basis_ == b.basis_; }

 private:
  struct Cache {
    std::once_flag once;
    std::unique_ptr<LatticeGaussian> sampler;
  };
  IntMatrix basis_;
  std::shared_ptr<Cache> cache_;
};

// Whether the smoothing precondition sigma >= ||T~|| * slack(dim) is
// enforced. Sampling with a narrower sigma still yields exact preimages; only
// the output distribution degrades.
enum class SigmaCheck { kEnforce, kRelaxed };

// Gaussian preimages for a fixed (A, T): A e == u (mod q).
class PreimageSampler {
 public:
  PreimageSampler(const ZqMatrix& a, const ShortBasis& t);

  std::vector<int64_t> sample(const ZqVector& u, double sigma, RandomSource& rng) const;
  const ZqMatrix& matrix() const { return a_; }

 private:
  ZqMatrix a_;
  ShortBasis t_;
  ModularSolver solver_;
};

std::vector<int64_t> sample_pre(const ZqMatrix& a, const ShortBasis& t, const ZqVector& u,
                                double sigma, RandomSource& rng,
                                SigmaCheck check = SigmaCheck::kEnforce);
std::vector<int64_t> sample_pre(const ZqMatrix& a, const IntMatrix& t, const ZqVector& u,
                                double sigma, RandomSource& rng,
                                SigmaCheck check = SigmaCheck::kEnforce);

// Columns e_j with (A | M) e_j == U_j (mod q). The M-part of each column is
// drawn from D_{Z^{m1},sigma}; the A-part is a preimage of the residual.
IntMatrix sample_left(const ZqMatrix& a, const ZqMatrix& m, const ShortBasis& t_a,
                      const ZqMatrix& u, double sigma, RandomSource& rng,
                      SigmaCheck check = SigmaCheck::kEnforce);

// Largest singular value of r estimated by power iteration (50 steps, fixed
// start vector).
double operator_norm_estimate(const IntMatrix& r);

// Columns e_j with (A | A R + B) e_j == U_j (mod q), using only a trapdoor
// for B.
IntMatrix sample_right(const ZqMatrix& a, const ZqMatrix& b, const IntMatrix& r,
                       const ShortBasis& t_b, const ZqMatrix& u, double sigma, RandomSource& rng);

// Randomized short basis of the kernel lattice of (A | M).
IntMatrix sample_basis_left(const ZqMatrix& a, const ZqMatrix& m, const ShortBasis& t_a,
                            double sigma, RandomSource& rng);
// Randomized short basis of the kernel lattice of (A | A R + B).
IntMatrix sample_basis_right(const ZqMatrix& a, const ZqMatrix& b, const IntMatrix& r,
                             const ShortBasis& t_b, double sigma, RandomSource& rng);

}  // namespace ibeetfa
