#include "ibeetfa/scheme.hpp"

#include <string>

#include "ibeetfa/error.hpp"
#include "ibeetfa/samplers.hpp"

namespace ibeetfa {

Identity::Identity(std::vector<int8_t> bits) : bits_(std::move(bits)) {
  for (auto b : bits_) {
    if (b != 1 && b != -1) throw Error(ErrorCode::kInvalidArgument, "identity entries must be +1 or -1");
  }
}

Identity identity_from_name(std::string_view name, size_t ell) {
  const auto h = hash_H(std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(name.data()), name.size()), ell);
  std::vector<int8_t> bits(ell);
  for (size_t i = 0; i < ell; ++i) bits[i] = static_cast<int8_t>(2 * h[i] - 1);
  return Identity(std::move(bits));
}

size_t PublicParams::element_count() const {
  size_t total = a.size() + a_prime.size() + b.size() + u.size();
  for (const auto& ai : a_list) total += ai.size();
  return total;
}

size_t MasterSecretKey::element_count() const { return t_a.matrix().size() + t_a_prime.matrix().size(); }

size_t UserSecretKey::element_count() const { return e.matrix().size() + e_prime.matrix().size(); }

size_t Ciphertext::element_count() const { return r.size() + c1.dim() + c2.dim() + c3.dim() + c4.dim(); }

namespace {

void check_identity(const PublicParams& pp, const Identity& id) {
  if (id.size() != pp.params.ell) {
    throw Error(ErrorCode::kDimensionMismatch,
                "identity has " + std::to_string(id.size()) + " entries, expected " + std::to_string(pp.params.ell));
  }
}

ZqVector zero_or_noise(NoiseMode noise, double alpha, const Modulus& q, size_t dim, RandomSource& rng) {
  if (noise == NoiseMode::kZero) return ZqVector(q, dim);
  return sample_psi_bar_vector(alpha, q, dim, rng);
}

ZqVector scaled_bits(const BitString& bits, const Modulus& q) {
  std::vector<uint64_t> out(bits.size());
  for (size_t i = 0; i < bits.size(); ++i) out[i] = bits[i] ? q.half() : 0;
  return ZqVector(q, std::move(out));
}

}  // namespace

std::pair<PublicParams, MasterSecretKey> setup(const ParamSet& params, RandomSource& rng) {
  const auto violations = validate_params(params);
  if (!violations.empty()) {
    std::string msg = "parameter set violates:";
    for (const auto& v : violations) msg += std::string(" [") + constraint_name(v.constraint) + "] " + v.detail + ";";
    throw Error(ErrorCode::kInvalidParams, msg);
  }
  const Modulus q(params.q);
  for (int attempt = 0; attempt < kSetupAttempts; ++attempt) {
    TrapdoorPair main = trap_gen(q, params.n, params.m, rng);
    TrapdoorPair prime = trap_gen(q, params.n, params.m, rng);
    // Basis delegation needs both matrices at full row rank.
    try {
      ModularSolver check_a(main.a);
      ModularSolver check_a_prime(prime.a);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kRankDeficient) continue;
      throw;
    }
    std::vector<ZqMatrix> a_list;
    a_list.reserve(params.ell);
    for (uint64_t i = 0; i < params.ell; ++i) a_list.push_back(sample_uniform_zq(params.n, params.m, q, rng));
    ZqMatrix b = sample_uniform_zq(params.n, params.m, q, rng);
    ZqMatrix u = sample_uniform_zq(params.n, params.t, q, rng);
    PublicParams pp{params, std::move(main.a), std::move(prime.a), std::move(a_list), std::move(b), std::move(u)};
    MasterSecretKey msk{ShortBasis(std::move(main.s)), ShortBasis(std::move(prime.s))};
    return {std::move(pp), std::move(msk)};
  }
  throw Error(ErrorCode::kSamplingFailed, "setup: rank-deficient trapdoor matrices on every attempt");
}

ZqMatrix compute_a_id(const PublicParams& pp, const Identity& id) {
  check_identity(pp, id);
  const Modulus& q = pp.modulus();
  std::vector<uint64_t> acc(pp.b.entries().begin(), pp.b.entries().end());
  for (size_t i = 0; i < id.size(); ++i) {
    auto ai = pp.a_list[i].entries();
    if (id[i] == 1) {
      for (size_t k = 0; k < acc.size(); ++k) acc[k] = q.add(acc[k], ai[k]);
    } else {
      for (size_t k = 0; k < acc.size(); ++k) acc[k] = q.sub(acc[k], ai[k]);
    }
  }
  return ZqMatrix(q, pp.b.rows(), pp.b.cols(), std::move(acc));
}

ZqMatrix compute_F(const PublicParams& pp, const Identity& id, KeySide side) {
  const ZqMatrix parts[] = {side == KeySide::kPrimary ? pp.a : pp.a_prime, compute_a_id(pp, id)};
  return concat_cols(parts);
}

UserSecretKey extract(const PublicParams& pp, const MasterSecretKey& msk, const Identity& id,
                      RandomSource& rng) {
  const ZqMatrix a_id = compute_a_id(pp, id);
  IntMatrix e = sample_basis_left(pp.a, a_id, msk.t_a, pp.params.sigma, rng);
  IntMatrix e_prime = sample_basis_left(pp.a_prime, a_id, msk.t_a_prime, pp.params.sigma, rng);
  return UserSecretKey{id, ShortBasis(std::move(e)), ShortBasis(std::move(e_prime))};
}

ZqMatrix tag_product(const PublicParams& pp, const IntMatrix& r) { return mat_mul(pp.a, r); }

EncryptResult encrypt_detailed(const PublicParams& pp, const Identity& id, const Message& msg,
                               RandomSource& rng, NoiseMode noise) {
  const ParamSet& p = pp.params;
  const Modulus& q = pp.modulus();
  check_identity(pp, id);
  if (msg.size() != p.t) {
    throw Error(ErrorCode::kDimensionMismatch,
                "message has " + std::to_string(msg.size()) + " bits, expected " + std::to_string(p.t));
  }

  EncryptionRandomness rnd{
      .s1 = sample_uniform_zq_vector(p.n, q, rng),
      .s2 = sample_uniform_zq_vector(p.n, q, rng),
      .x1 = zero_or_noise(noise, p.alpha, q, p.t, rng),
      .x2 = zero_or_noise(noise, p.alpha, q, p.t, rng),
      .y1 = ZqVector(q, 0), .y2 = ZqVector(q, 0),
      .r_list = {}, .r_id = {}, .r = {},
      .z1 = ZqVector(q, 0), .z2 = ZqVector(q, 0), .r1 = ZqVector(q, 0), .r2 = ZqVector(q, 0)};

  const ZqVector c1 = vec_add(vec_add(transpose_mul(pp.u, rnd.s1), rnd.x1), scaled_bits(msg, q));
  const ZqVector c2 =
      vec_add(vec_add(transpose_mul(pp.u, rnd.s2), rnd.x2), scaled_bits(hash_H(msg, p.t), q));

  const size_t m = p.m;
  std::vector<int64_t> r_id(m * m, 0);
  rnd.r_list.reserve(p.ell);
  for (size_t i = 0; i < p.ell; ++i) {
    IntMatrix ri = sample_sign_matrix(m, rng);
    auto e = ri.entries();
    for (size_t k = 0; k < e.size(); ++k) r_id[k] += id[i] * e[k];
    rnd.r_list.push_back(std::move(ri));
  }
  rnd.r_id = IntMatrix(m, m, std::move(r_id));
  rnd.r = sample_bounded_matrix(static_cast<int64_t>(p.ell), m, rng);

  rnd.y1 = zero_or_noise(noise, p.alpha, q, m, rng);
  rnd.y2 = zero_or_noise(noise, p.alpha, q, m, rng);
  rnd.z1 = transpose_mul(rnd.r_id, rnd.y1);
  rnd.z2 = transpose_mul(rnd.r_id, rnd.y2);
  rnd.r1 = transpose_mul(rnd.r, rnd.y1);
  rnd.r2 = transpose_mul(rnd.r, rnd.y2);

  const ZqMatrix a_id = compute_a_id(pp, id);
  const ZqMatrix ar = tag_product(pp, rnd.r);
  // F1 = (A | A_ID | A R), F2 = (A' | A_ID | A R) with the same R.
  const ZqVector noise1[] = {rnd.y1, rnd.z1, rnd.r1};
  const ZqVector noise2[] = {rnd.y2, rnd.z2, rnd.r2};
  const ZqVector f1s[] = {transpose_mul(pp.a, rnd.s1), transpose_mul(a_id, rnd.s1), transpose_mul(ar, rnd.s1)};
  const ZqVector f2s[] = {transpose_mul(pp.a_prime, rnd.s2), transpose_mul(a_id, rnd.s2), transpose_mul(ar, rnd.s2)};
  const ZqVector c3 = vec_add(concat(f1s), concat(noise1));
  const ZqVector c4 = vec_add(concat(f2s), concat(noise2));

  Ciphertext ct{rnd.r, c1, c2, c3, c4, BitString()};
  ct.c5 = compute_tag(pp, ct);
  return {std::move(ct), std::move(rnd)};
}

Ciphertext encrypt(const PublicParams& pp, const Identity& id, const Message& msg, RandomSource& rng) {
  return encrypt_detailed(pp, id, msg, rng, NoiseMode::kSampled).ct;
}

void check_shape(const PublicParams& pp, const Ciphertext& ct) {
  const ParamSet& p = pp.params;
  if (ct.r.rows() != p.m || ct.r.cols() != p.m || ct.c1.dim() != p.t || ct.c2.dim() != p.t ||
      ct.c3.dim() != 3 * p.m || ct.c4.dim() != 3 * p.m || ct.c5.size() != p.lambda) {
    throw Error(ErrorCode::kDimensionMismatch, "ciphertext shape does not match the parameter set");
  }
  if (!(ct.c1.modulus() == pp.modulus())) throw Error(ErrorCode::kInvalidArgument, "ciphertext modulus differs");
}

BitString compute_tag(const PublicParams& pp, const Ciphertext& ct) {
  const ParamSet& p = pp.params;
  const CtShape shape{p.q, p.n, p.m, p.t, p.ell};
  const auto bytes = canonical_ct_bytes(shape, ct.r, ct.c1, ct.c2, ct.c3, ct.c4);
  return hash_Hprime(std::span<const uint8_t>(bytes), p.lambda);
}

bool verify_tag(const PublicParams& pp, const Ciphertext& ct) {
  check_shape(pp, ct);
  return compute_tag(pp, ct) == ct.c5;
}

BitString decode_bits(const ZqVector& w) {
  const Modulus& q = w.modulus();
  const uint64_t half = q.half();
  const uint64_t quarter = q.quarter();
  BitString out(w.dim());
  for (size_t i = 0; i < w.dim(); ++i) {
    const uint64_t d = w[i] > half ? w[i] - half : half - w[i];
    out.set(i, d < quarter);
  }
  return out;
}

BitString decode_with_preimage(const IntMatrix& e, const ZqVector& c_a, const ZqVector& c_b) {
  if (e.rows() != c_b.dim() || e.cols() != c_a.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "preimage does not match ciphertext components");
  }
  return decode_bits(vec_sub(c_a, transpose_mul(e, c_b)));
}

BitString decode_with_basis(const PublicParams& pp, const ZqMatrix& f, const ShortBasis& basis,
                            const IntMatrix& r, const ZqVector& c_a, const ZqVector& c_b,
                            RandomSource& rng) {
  // The key basis is only about sigma sqrt(2m) short, so the smoothing
  // precondition cannot hold at the shared sigma; preimages remain exact.
  const IntMatrix e = sample_left(f, tag_product(pp, r), basis, pp.u, pp.params.sigma, rng, SigmaCheck::kRelaxed);
  return decode_with_preimage(e, c_a, c_b);
}

std::optional<Message> decrypt(const PublicParams& pp, const UserSecretKey& sk, const Ciphertext& ct,
                               RandomSource& rng) {
  if (!verify_tag(pp, ct)) return std::nullopt;
  const Message m = decode_with_basis(pp, compute_F(pp, sk.id, KeySide::kPrimary), sk.e, ct.r, ct.c1, ct.c3, rng);
  const BitString h = decode_with_basis(pp, compute_F(pp, sk.id, KeySide::kPrime), sk.e_prime, ct.r, ct.c2, ct.c4, rng);
  if (h != hash_H(m, pp.params.t)) return std::nullopt;
  return m;
}

}  // namespace ibeetfa
