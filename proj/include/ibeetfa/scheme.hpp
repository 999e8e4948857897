#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "ibeetfa/hashing.hpp"
#include "ibeetfa/params.hpp"
#include "ibeetfa/random.hpp"
#include "ibeetfa/trapdoor.hpp"
#include "ibeetfa/zq.hpp"

namespace ibeetfa {

// Identity vector in {-1, +1}^ell.
class Identity {
 public:
  Identity() = default;
  explicit Identity(std::vector<int8_t> bits);

  size_t size() const { return bits_.size(); }
  int8_t operator[](size_t i) const { return bits_[i]; }
  std::span<const int8_t> bits() const { return bits_; }

  friend bool operator==(const Identity&, const Identity&) = default;

 private:
  std::vector<int8_t> bits_;
};

// Canonical embedding of a name: bit b of H(name, ell) becomes 2b - 1.
Identity identity_from_name(std::string_view name, size_t ell);

using Message = BitString;

struct PublicParams {
  ParamSet params;
  ZqMatrix a;
  ZqMatrix a_prime;
  std::vector<ZqMatrix> a_list;
  ZqMatrix b;
  ZqMatrix u;

  const Modulus& modulus() const { return a.modulus(); }
  // (ell + 3) m n + n t
  size_t element_count() const;
};

struct MasterSecretKey {
  ShortBasis t_a;
  ShortBasis t_a_prime;

  size_t element_count() const;  // 2 m^2
};

struct UserSecretKey {
  Identity id;
  ShortBasis e;
  ShortBasis e_prime;

  size_t element_count() const;  // two 2m x 2m bases: 8 m^2
};

struct Ciphertext {
  IntMatrix r;  // m x m, entries in [-ell, ell]
  ZqVector c1;  // t
  ZqVector c2;  // t
  ZqVector c3;  // 3m
  ZqVector c4;  // 3m
  BitString c5; // lambda

  // Residues (R, c1..c4): m^2 + 2t + 6m. The tag adds lambda bits.
  size_t element_count() const;

  friend bool operator==(const Ciphertext&, const Ciphertext&) = default;
};

// Everything Encrypt draws, kept for exact-equation tests.
struct EncryptionRandomness {
  ZqVector s1, s2;
  ZqVector x1, x2;
  ZqVector y1, y2;
  std::vector<IntMatrix> r_list;
  IntMatrix r_id;
  IntMatrix r;
  ZqVector z1, z2, r1, r2;
};

enum class KeySide { kPrimary, kPrime };

// Test hook: kZero forces every noise vector (x, y and hence z, r) to zero.
enum class NoiseMode { kSampled, kZero };

inline constexpr int kSetupAttempts = 8;

std::pair<PublicParams, MasterSecretKey> setup(const ParamSet& params, RandomSource& rng);

// B + sum_i id_i A_i
ZqMatrix compute_a_id(const PublicParams& pp, const Identity& id);
// (A | A_ID) or (A' | A_ID)
ZqMatrix compute_F(const PublicParams& pp, const Identity& id, KeySide side);

UserSecretKey extract(const PublicParams& pp, const MasterSecretKey& msk, const Identity& id,
                      RandomSource& rng);

struct EncryptResult {
  Ciphertext ct;
  EncryptionRandomness randomness;
};

Ciphertext encrypt(const PublicParams& pp, const Identity& id, const Message& msg, RandomSource& rng);
EncryptResult encrypt_detailed(const PublicParams& pp, const Identity& id, const Message& msg,
                               RandomSource& rng, NoiseMode noise);

// H'(R || c1 || c2 || c3 || c4)
BitString compute_tag(const PublicParams& pp, const Ciphertext& ct);
bool verify_tag(const PublicParams& pp, const Ciphertext& ct);

// Empty on integrity failure or when the recovered digest does not match
// H(m). Dimension faults throw.
std::optional<Message> decrypt(const PublicParams& pp, const UserSecretKey& sk, const Ciphertext& ct,
                               RandomSource& rng);

// bit_i = 1 iff |w_i - floor(q/2)| < floor(q/4) on representatives in [0, q).
BitString decode_bits(const ZqVector& w);

// Samples e with (F | A R) e == U via the given basis of F's kernel lattice
// and decodes c_a - e^T c_b. Shared by Decrypt and the equality tests.
BitString decode_with_basis(const PublicParams& pp, const ZqMatrix& f, const ShortBasis& basis,
                            const IntMatrix& r, const ZqVector& c_a, const ZqVector& c_b,
                            RandomSource& rng);
// c_a - e^T c_b, decoded.
BitString decode_with_preimage(const IntMatrix& e, const ZqVector& c_a, const ZqVector& c_b);

// A R for a ciphertext tag matrix.
ZqMatrix tag_product(const PublicParams& pp, const IntMatrix& r);

void check_shape(const PublicParams& pp, const Ciphertext& ct);

}  // namespace ibeetfa
