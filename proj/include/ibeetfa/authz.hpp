#pragma once

#include <optional>
#include <variant>

#include "ibeetfa/hashing.hpp"
#include "ibeetfa/random.hpp"
#include "ibeetfa/scheme.hpp"

namespace ibeetfa {

// Type-1: the prime-side key basis. The identity rides along because the
// test needs F'_ID.
struct TrapdoorT1 {
  Identity id;
  ShortBasis e_prime;  // 2m x 2m

  friend bool operator==(const TrapdoorT1&, const TrapdoorT1&) = default;
};

// Type-2: one preimage e' with (F'_ID | A R) e' == U, bound to a single
// ciphertext through its tag c5.
struct TrapdoorT2 {
  Identity id;
  BitString ct_binding;
  IntMatrix e_prime;  // 3m x t

  friend bool operator==(const TrapdoorT2&, const TrapdoorT2&) = default;
};

// Type-3: either form, tagged.
struct TrapdoorT3 {
  std::variant<TrapdoorT1, TrapdoorT2> payload;

  bool is_basis() const { return payload.index() == 0; }
  friend bool operator==(const TrapdoorT3&, const TrapdoorT3&) = default;
};

TrapdoorT1 td1(const UserSecretKey& sk, const Identity& id);
// Empty when the ciphertext fails its integrity check.
std::optional<TrapdoorT2> td2(const PublicParams& pp, const UserSecretKey& sk, const Identity& id,
                              const Ciphertext& ct, RandomSource& rng);
TrapdoorT3 td3_basis(const UserSecretKey& sk, const Identity& id);
std::optional<TrapdoorT3> td3_ct(const PublicParams& pp, const UserSecretKey& sk, const Identity& id,
                                 const Ciphertext& ct, RandomSource& rng);

// H(m) recovered with a fresh preimage sampled from the basis.
std::optional<BitString> digest_from_basis(const PublicParams& pp, const TrapdoorT1& td, const Ciphertext& ct,
                                           RandomSource& rng);
// H(m) recovered with the stored preimage. Empty if td is bound to another
// ciphertext.
std::optional<BitString> digest_from_e(const TrapdoorT2& td, const Ciphertext& ct);

// 1 (true) iff both digests agree; empty if either side is rejected.
std::optional<bool> test1(const TrapdoorT1& td_i, const TrapdoorT1& td_j, const Ciphertext& ct_i,
                          const Ciphertext& ct_j, const PublicParams& pp, RandomSource& rng);
std::optional<bool> test2(const TrapdoorT2& td_i, const TrapdoorT2& td_j, const Ciphertext& ct_i,
                          const Ciphertext& ct_j);
std::optional<bool> test3(const TrapdoorT3& td_i, const TrapdoorT3& td_j, const Ciphertext& ct_i,
                          const Ciphertext& ct_j, const PublicParams& pp, RandomSource& rng);

}  // namespace ibeetfa
