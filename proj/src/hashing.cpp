#include "ibeetfa/hashing.hpp"

#include <memory>
#include <string>

#include <openssl/evp.h>

#include "ibeetfa/error.hpp"

namespace ibeetfa {

BitString::BitString(std::vector<uint8_t> bits) : bits_(std::move(bits)) {
  for (auto b : bits_) {
    if (b > 1) throw Error(ErrorCode::kInvalidArgument, "bit value other than 0 or 1");
  }
}

BitString BitString::from_bytes(std::span<const uint8_t> bytes, size_t len) {
  if (bytes.size() * 8 < len) throw Error(ErrorCode::kDimensionMismatch, "not enough bytes for bit string");
  BitString out(len);
  for (size_t i = 0; i < len; ++i) out.bits_[i] = (bytes[i / 8] >> (i % 8)) & 1;
  return out;
}

std::vector<uint8_t> BitString::to_bytes() const {
  std::vector<uint8_t> out((bits_.size() + 7) / 8, 0);
  for (size_t i = 0; i < bits_.size(); ++i) out[i / 8] |= static_cast<uint8_t>(bits_[i] << (i % 8));
  return out;
}

BitString shake_bits(std::string_view domain, std::span<const uint8_t> input, size_t bits) {
  if (bits == 0) throw Error(ErrorCode::kInvalidArgument, "hash output length must be positive");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  std::vector<uint8_t> digest((bits + 7) / 8);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_shake256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), domain.data(), domain.size()) != 1 ||
      EVP_DigestUpdate(ctx.get(), input.data(), input.size()) != 1 ||
      EVP_DigestFinalXOF(ctx.get(), digest.data(), digest.size()) != 1) {
    throw Error(ErrorCode::kInvalidArgument, "SHAKE256 evaluation failed");
  }
  return BitString::from_bytes(digest, bits);
}

BitString hash_H(std::span<const uint8_t> input, size_t t) { return shake_bits(kHashDomainH, input, t); }

BitString hash_Hprime(std::span<const uint8_t> input, size_t lambda) {
  return shake_bits(kHashDomainHprime, input, lambda);
}

BitString hash_H(const BitString& message, size_t t) {
  std::vector<uint8_t> buf;
  append_u64(buf, message.size());
  const auto packed = message.to_bytes();
  buf.insert(buf.end(), packed.begin(), packed.end());
  return hash_H(std::span<const uint8_t>(buf), t);
}

void append_u64(std::vector<uint8_t>& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

std::vector<uint8_t> canonical_ct_bytes(const CtShape& shape, const IntMatrix& r, const ZqVector& c1,
                                        const ZqVector& c2, const ZqVector& c3, const ZqVector& c4) {
  if (r.rows() != shape.m || r.cols() != shape.m || c1.dim() != shape.t || c2.dim() != shape.t ||
      c3.dim() != 3 * shape.m || c4.dim() != 3 * shape.m) {
    throw Error(ErrorCode::kDimensionMismatch, "ciphertext components do not match m = " +
                                                   std::to_string(shape.m) + ", t = " + std::to_string(shape.t));
  }
  const Modulus& q = c1.modulus();
  std::vector<uint8_t> out;
  out.reserve(8 * (5 + shape.m * shape.m + 2 * shape.t + 6 * shape.m));
  for (uint64_t v : {shape.q, shape.n, shape.m, shape.t, shape.ell}) append_u64(out, v);
  for (int64_t v : r.entries()) append_u64(out, q.reduce(v));
  for (const ZqVector* c : {&c1, &c2, &c3, &c4}) {
    for (uint64_t v : c->entries()) append_u64(out, v);
  }
  return out;
}

}  // namespace ibeetfa
