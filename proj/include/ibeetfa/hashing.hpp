#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "ibeetfa/zq.hpp"

namespace ibeetfa {

// Ordered bit sequence, one bit per element (0 or 1).
class BitString {
 public:
  BitString() = default;
  explicit BitString(size_t len) : bits_(len, 0) {}
  explicit BitString(std::vector<uint8_t> bits);
  // Bits of `bytes`, least significant bit of each byte first.
  static BitString from_bytes(std::span<const uint8_t> bytes, size_t len);

  size_t size() const { return bits_.size(); }
  uint8_t operator[](size_t i) const { return bits_[i]; }
  void set(size_t i, bool v) { bits_[i] = v ? 1 : 0; }
  std::span<const uint8_t> bits() const { return bits_; }
  // ceil(size / 8) bytes, least significant bit first, zero padded.
  std::vector<uint8_t> to_bytes() const;

  friend bool operator==(const BitString&, const BitString&) = default;

 private:
  std::vector<uint8_t> bits_;
};

inline constexpr std::string_view kHashDomainH = "IBEETFA-H";
inline constexpr std::string_view kHashDomainHprime = "IBEETFA-Hp";

// SHAKE256(domain || input) truncated to `bits` bits.
BitString shake_bits(std::string_view domain, std::span<const uint8_t> input, size_t bits);

// Message hash H: {0,1}* -> {0,1}^t.
BitString hash_H(std::span<const uint8_t> input, size_t t);
// Tag hash H': {0,1}* -> {0,1}^lambda.
BitString hash_Hprime(std::span<const uint8_t> input, size_t lambda);
// H applied to a bit string: the input is its 64-bit little-endian length
// followed by its packed bytes.
BitString hash_H(const BitString& message, size_t t);

struct CtShape {
  uint64_t q, n, m, t, ell;
};

// Fixed-layout encoding of (R, c1, c2, c3, c4): q, n, m, t, ell as 64-bit
// little-endian words, then R row-major as residues mod q, then c1..c4; every
// word 64-bit little-endian. Length 8 (5 + m^2 + 2t + 6m).
std::vector<uint8_t> canonical_ct_bytes(const CtShape& shape, const IntMatrix& r, const ZqVector& c1,
                                        const ZqVector& c2, const ZqVector& c3, const ZqVector& c4);

void append_u64(std::vector<uint8_t>& out, uint64_t v);

}  // namespace ibeetfa
