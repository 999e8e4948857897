#pragma once

#include <map>
#include <string>

#include "ibeetfa/params.hpp"
#include "ibeetfa/random.hpp"
#include "ibeetfa/scheme.hpp"

namespace ibeetfa::testing_support {

// One toy-preset system per test process, plus a key cache.
struct ToySystem {
  PublicParams pp;
  MasterSecretKey msk;
  std::map<std::string, UserSecretKey> keys;

  const UserSecretKey& key(const std::string& name) {
    auto it = keys.find(name);
    if (it == keys.end()) {
      RandomSource rng("extract:" + name);
      it = keys.emplace(name, extract(pp, msk, identity_from_name(name, pp.params.ell), rng)).first;
    }
    return it->second;
  }
  Identity id(const std::string& name) const { return identity_from_name(name, pp.params.ell); }
};

inline ToySystem& toy_system() {
  static ToySystem sys = [] {
    RandomSource rng("toy-system");
    auto [pp, msk] = setup(preset("toy"), rng);
    return ToySystem{std::move(pp), std::move(msk), {}};
  }();
  return sys;
}

inline BitString random_message(size_t t, RandomSource& rng) {
  BitString m(t);
  for (size_t i = 0; i < t; ++i) m.set(i, rng.bit());
  return m;
}

// Flips bit `position` of the serialized (R, c1, c2, c3, c4) words. Returns
// false when the flip would leave a residue outside [0, q).
inline bool flip_serialized_bit(Ciphertext& ct, const Modulus& q, uint64_t position) {
  const uint64_t word = position / 64;
  const uint64_t mask = uint64_t{1} << (position % 64);
  const uint64_t r_words = ct.r.size();
  if (word < r_words) {
    std::vector<int64_t> e(ct.r.entries().begin(), ct.r.entries().end());
    e[word] = static_cast<int64_t>(static_cast<uint64_t>(e[word]) ^ mask);
    ct.r = IntMatrix(ct.r.rows(), ct.r.cols(), std::move(e));
    return true;
  }
  uint64_t idx = word - r_words;
  for (ZqVector* v : {&ct.c1, &ct.c2, &ct.c3, &ct.c4}) {
    if (idx < v->dim()) {
      const uint64_t flipped = (*v)[idx] ^ mask;
      if (flipped >= q.value()) return false;
      v->set(idx, flipped);
      return true;
    }
    idx -= v->dim();
  }
  return false;
}

inline uint64_t serialized_bit_count(const Ciphertext& ct) {
  return 64 * (ct.r.size() + ct.c1.dim() + ct.c2.dim() + ct.c3.dim() + ct.c4.dim());
}

}  // namespace ibeetfa::testing_support
