#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ibeetfa/random.hpp"
#include "ibeetfa/zq.hpp"

namespace ibeetfa {

// Concrete stand-in for the asymptotic omega(sqrt(log k)) slack factor:
// ceil(sqrt(log2 k)) + 1.
double slack(size_t k);

// Tail cut of the integer sampler, in units of sigma.
inline constexpr double kTailCut = 12.0;

// Sample from D_{Z,sigma,center}, mass proportional to
// exp(-pi (x - center)^2 / sigma^2).
int64_t sample_z_gaussian(double sigma, double center, RandomSource& rng);

// Randomized nearest-plane sampler over the lattice spanned by the columns of
// a nonsingular integer basis. The orthogonalisation is computed once at
// construction; sample() costs O(dim^2).
class LatticeGaussian {
 public:
  explicit LatticeGaussian(const IntMatrix& basis);

  size_t dim() const { return basis_.cols(); }
  const IntMatrix& basis() const { return basis_; }
  // Largest Gram-Schmidt length in double precision.
  double gs_norm() const { return gs_norm_; }

  // A lattice point distributed close to D_{L,sigma,center}.
  std::vector<int64_t> sample(double sigma, std::span<const double> center, RandomSource& rng) const;

 private:
  IntMatrix basis_;
  std::vector<double> q_;  // orthogonal factor, column-major dim x dim
  std::vector<double> r_;  // triangular factor, column-major dim x dim
  double gs_norm_ = 0.0;
};

std::vector<int64_t> sample_d_lattice(const IntMatrix& basis, double sigma,
                                      std::span<const double> center, RandomSource& rng);

// One draw of the rounded Gaussian noise: round(q X) mod q with
// X ~ N(0, alpha / sqrt(2 pi)).
uint64_t sample_psi_bar(double alpha, const Modulus& q, RandomSource& rng);
ZqVector sample_psi_bar_vector(double alpha, const Modulus& q, size_t dim, RandomSource& rng);

// m x m matrix with i.i.d. entries uniform over {-1, +1}.
IntMatrix sample_sign_matrix(size_t m, RandomSource& rng);
// m x m matrix with i.i.d. entries uniform over {-ell, ..., ell}.
IntMatrix sample_bounded_matrix(int64_t ell, size_t m, RandomSource& rng);
ZqMatrix sample_uniform_zq(size_t rows, size_t cols, const Modulus& q, RandomSource& rng);
ZqVector sample_uniform_zq_vector(size_t dim, const Modulus& q, RandomSource& rng);

}  // namespace ibeetfa
