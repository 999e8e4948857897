#include "ibeetfa/authz.hpp"

#include "ibeetfa/error.hpp"

namespace ibeetfa {

TrapdoorT1 td1(const UserSecretKey& sk, const Identity& id) {
  if (!(sk.id == id)) throw Error(ErrorCode::kInvalidArgument, "secret key belongs to a different identity");
  return TrapdoorT1{id, sk.e_prime};
}

std::optional<TrapdoorT2> td2(const PublicParams& pp, const UserSecretKey& sk, const Identity& id,
                              const Ciphertext& ct, RandomSource& rng) {
  if (!(sk.id == id)) throw Error(ErrorCode::kInvalidArgument, "secret key belongs to a different identity");
  if (!verify_tag(pp, ct)) return std::nullopt;
  IntMatrix e = sample_left(compute_F(pp, id, KeySide::kPrime), tag_product(pp, ct.r), sk.e_prime, pp.u,
                            pp.params.sigma, rng, SigmaCheck::kRelaxed);
  return TrapdoorT2{id, ct.c5, std::move(e)};
}

TrapdoorT3 td3_basis(const UserSecretKey& sk, const Identity& id) { return TrapdoorT3{td1(sk, id)}; }

std::optional<TrapdoorT3> td3_ct(const PublicParams& pp, const UserSecretKey& sk, const Identity& id,
                                 const Ciphertext& ct, RandomSource& rng) {
  auto td = td2(pp, sk, id, ct, rng);
  if (!td) return std::nullopt;
  return TrapdoorT3{std::move(*td)};
}

std::optional<BitString> digest_from_basis(const PublicParams& pp, const TrapdoorT1& td, const Ciphertext& ct,
                                           RandomSource& rng) {
  if (!verify_tag(pp, ct)) return std::nullopt;
  return decode_with_basis(pp, compute_F(pp, td.id, KeySide::kPrime), td.e_prime, ct.r, ct.c2, ct.c4, rng);
}

std::optional<BitString> digest_from_e(const TrapdoorT2& td, const Ciphertext& ct) {
  if (td.ct_binding != ct.c5) return std::nullopt;
  return decode_with_preimage(td.e_prime, ct.c2, ct.c4);
}

namespace {

std::optional<bool> compare(const std::optional<BitString>& h_i, const std::optional<BitString>& h_j) {
  if (!h_i || !h_j) return std::nullopt;
  return *h_i == *h_j;
}

std::optional<BitString> digest(const TrapdoorT3& td, const Ciphertext& ct, const PublicParams& pp,
                                RandomSource& rng) {
  if (const auto* basis = std::get_if<TrapdoorT1>(&td.payload)) return digest_from_basis(pp, *basis, ct, rng);
  return digest_from_e(std::get<TrapdoorT2>(td.payload), ct);
}

}  // namespace

std::optional<bool> test1(const TrapdoorT1& td_i, const TrapdoorT1& td_j, const Ciphertext& ct_i,
                          const Ciphertext& ct_j, const PublicParams& pp, RandomSource& rng) {
  const auto h_i = digest_from_basis(pp, td_i, ct_i, rng);
  if (!h_i) return std::nullopt;
  return compare(h_i, digest_from_basis(pp, td_j, ct_j, rng));
}

std::optional<bool> test2(const TrapdoorT2& td_i, const TrapdoorT2& td_j, const Ciphertext& ct_i,
                          const Ciphertext& ct_j) {
  return compare(digest_from_e(td_i, ct_i), digest_from_e(td_j, ct_j));
}

std::optional<bool> test3(const TrapdoorT3& td_i, const TrapdoorT3& td_j, const Ciphertext& ct_i,
                          const Ciphertext& ct_j, const PublicParams& pp, RandomSource& rng) {
  const auto h_i = digest(td_i, ct_i, pp, rng);
  if (!h_i) return std::nullopt;
  return compare(h_i, digest(td_j, ct_j, pp, rng));
}

}  // namespace ibeetfa
