#include "ibeetfa/serialize.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <bit>
#include <cstring>
#include <string>

#include "ibeetfa/error.hpp"

namespace ibeetfa {

const char* file_kind_name(FileKind k) {
  switch (k) {
    case FileKind::kPP: return "PP";
    case FileKind::kMSK: return "MSK";
    case FileKind::kSK: return "SK";
    case FileKind::kCT: return "CT";
    case FileKind::kTD1: return "TD1";
    case FileKind::kTD2: return "TD2";
    case FileKind::kTD3: return "TD3";
  }
  return "?";
}

namespace {

// Upper bounds on loaded dimensions; they keep a corrupt header from asking
// for absurd allocations.
constexpr uint64_t kMaxDim = 1u << 16;

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorCode::kFormat, what); }

void put_i64(std::vector<uint8_t>& out, int64_t v) { append_u64(out, static_cast<uint64_t>(v)); }

void put_f64(std::vector<uint8_t>& out, double v) { append_u64(out, std::bit_cast<uint64_t>(v)); }

void put_zq(std::vector<uint8_t>& out, std::span<const uint64_t> entries) {
  for (auto v : entries) append_u64(out, v);
}

void put_int(std::vector<uint8_t>& out, const IntMatrix& m) {
  for (auto v : m.entries()) put_i64(out, v);
}

void put_bits(std::vector<uint8_t>& out, const BitString& b) {
  const auto bytes = b.to_bytes();
  out.insert(out.end(), bytes.begin(), bytes.end());
}

void put_identity(std::vector<uint8_t>& out, const Identity& id) {
  for (auto b : id.bits()) put_i64(out, b);
}

class Reader {
 public:
  explicit Reader(std::span<const uint8_t> bytes) : bytes_(bytes) {}

  std::span<const uint8_t> take(size_t n) {
    if (bytes_.size() - pos_ < n) fail("truncated file");
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  uint64_t u64() {
    auto s = take(8);
    uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | s[i];
    return v;
  }
  int64_t i64() { return static_cast<int64_t>(u64()); }
  double f64() { return std::bit_cast<double>(u64()); }
  uint8_t u8() { return take(1)[0]; }

  ZqMatrix zq_matrix(const Modulus& q, size_t rows, size_t cols) {
    std::vector<uint64_t> e(rows * cols);
    for (auto& v : e) {
      v = u64();
      if (v >= q.value()) fail("residue out of range");
    }
    return ZqMatrix(q, rows, cols, std::move(e));
  }
  ZqVector zq_vector(const Modulus& q, size_t dim) {
    std::vector<uint64_t> e(dim);
    for (auto& v : e) {
      v = u64();
      if (v >= q.value()) fail("residue out of range");
    }
    return ZqVector(q, std::move(e));
  }
  IntMatrix int_matrix(size_t rows, size_t cols) {
    std::vector<int64_t> e(rows * cols);
    for (auto& v : e) v = i64();
    return IntMatrix(rows, cols, std::move(e));
  }
  BitString bits(size_t len) {
    auto s = take((len + 7) / 8);
    return BitString::from_bytes(s, len);
  }
  Identity identity(size_t ell) {
    std::vector<int8_t> bits(ell);
    for (auto& b : bits) {
      const int64_t v = i64();
      if (v != 1 && v != -1) fail("identity entry outside {-1, +1}");
      b = static_cast<int8_t>(v);
    }
    return Identity(std::move(bits));
  }

  size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::span<const uint8_t> bytes_;
  size_t pos_ = 0;
};

std::vector<uint8_t> header(FileKind kind, const ParamSet& p) {
  std::vector<uint8_t> out(kMagic.begin(), kMagic.end());
  out.push_back(static_cast<uint8_t>(kFormatVersion & 0xff));
  out.push_back(static_cast<uint8_t>(kFormatVersion >> 8));
  out.push_back(static_cast<uint8_t>(kind));
  const auto fp = params_fingerprint(p);
  out.insert(out.end(), fp.begin(), fp.end());
  const auto enc = encode_params(p);
  out.insert(out.end(), enc.begin(), enc.end());
  return out;
}

struct Parsed {
  FileInfo info;
  Reader reader;
};

Parsed parse(std::span<const uint8_t> bytes) {
  Reader r(bytes);
  const auto magic = r.take(4);
  if (!std::equal(magic.begin(), magic.end(), kMagic.begin())) fail("bad magic");
  const auto ver = r.take(2);
  const uint16_t version = static_cast<uint16_t>(ver[0] | (ver[1] << 8));
  if (version != kFormatVersion) fail("unsupported format version " + std::to_string(version));
  const uint8_t kind = r.u8();
  if (kind < 1 || kind > 7) fail("unknown file kind " + std::to_string(kind));
  const auto fp = r.take(32);

  ParamSet p;
  p.lambda = r.u64();
  p.n = r.u64();
  p.m = r.u64();
  p.q = r.u64();
  p.t = r.u64();
  p.ell = r.u64();
  p.sigma = r.f64();
  p.alpha = r.f64();
  p.q_bound = r.u64();

  const auto expect_fp = params_fingerprint(p);
  if (!std::equal(fp.begin(), fp.end(), expect_fp.begin())) fail("parameter fingerprint does not match parameter block");
  for (uint64_t d : {p.lambda, p.n, p.m, p.t, p.ell}) {
    if (d == 0 || d > kMaxDim) fail("parameter dimension out of range");
  }
  if (p.q < 3 || p.q >= (uint64_t{1} << 62) || !is_prime(p.q)) fail("modulus is not an odd prime below 2^62");
  return {FileInfo{static_cast<FileKind>(kind), p}, r};
}

Parsed open(std::span<const uint8_t> bytes, FileKind kind, const ParamSet* expected) {
  Parsed parsed = parse(bytes);
  if (parsed.info.kind != kind) {
    fail(std::string("expected a ") + file_kind_name(kind) + " file, found " + file_kind_name(parsed.info.kind));
  }
  if (expected && params_fingerprint(*expected) != params_fingerprint(parsed.info.params)) {
    fail("parameter fingerprint differs from the public parameters");
  }
  return parsed;
}

void put_td1(std::vector<uint8_t>& out, const TrapdoorT1& td) {
  put_identity(out, td.id);
  put_int(out, td.e_prime.matrix());
}

void put_td2(std::vector<uint8_t>& out, const TrapdoorT2& td) {
  put_identity(out, td.id);
  put_bits(out, td.ct_binding);
  put_int(out, td.e_prime);
}

TrapdoorT1 read_td1(Reader& r, const ParamSet& p) {
  Identity id = r.identity(p.ell);
  return TrapdoorT1{std::move(id), ShortBasis(r.int_matrix(2 * p.m, 2 * p.m))};
}

TrapdoorT2 read_td2(Reader& r, const ParamSet& p) {
  Identity id = r.identity(p.ell);
  BitString binding = r.bits(p.lambda);
  return TrapdoorT2{std::move(id), std::move(binding), r.int_matrix(3 * p.m, p.t)};
}

void check_size(const Reader& r, unsigned __int128 expected) {
  if (r.remaining() != expected) fail("payload length does not match the parameter set");
}

void check_dims(const ParamSet& p, const Ciphertext& ct) {
  if (ct.r.rows() != p.m || ct.r.cols() != p.m || ct.c1.dim() != p.t || ct.c2.dim() != p.t ||
      ct.c3.dim() != 3 * p.m || ct.c4.dim() != 3 * p.m || ct.c5.size() != p.lambda) {
    throw Error(ErrorCode::kDimensionMismatch, "ciphertext shape does not match the parameter set");
  }
}

using u128 = unsigned __int128;

}  // namespace

std::vector<uint8_t> encode_params(const ParamSet& p) {
  std::vector<uint8_t> out;
  out.reserve(kParamBytes);
  append_u64(out, p.lambda);
  append_u64(out, p.n);
  append_u64(out, p.m);
  append_u64(out, p.q);
  append_u64(out, p.t);
  append_u64(out, p.ell);
  put_f64(out, p.sigma);
  put_f64(out, p.alpha);
  append_u64(out, p.q_bound);
  return out;
}

std::array<uint8_t, 32> params_fingerprint(const ParamSet& p) {
  const auto enc = encode_params(p);
  std::array<uint8_t, 32> out{};
  unsigned int len = 0;
  if (EVP_Digest(enc.data(), enc.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 || len != 32) {
    throw Error(ErrorCode::kFormat, "SHA-256 failed");
  }
  return out;
}

FileInfo peek_file(std::span<const uint8_t> bytes) { return parse(bytes).info; }

std::vector<uint8_t> serialize(const PublicParams& pp) {
  auto out = header(FileKind::kPP, pp.params);
  put_zq(out, pp.a.entries());
  put_zq(out, pp.a_prime.entries());
  for (const auto& ai : pp.a_list) put_zq(out, ai.entries());
  put_zq(out, pp.b.entries());
  put_zq(out, pp.u.entries());
  return out;
}

std::vector<uint8_t> serialize(const ParamSet& p, const MasterSecretKey& msk) {
  auto out = header(FileKind::kMSK, p);
  put_int(out, msk.t_a.matrix());
  put_int(out, msk.t_a_prime.matrix());
  return out;
}

std::vector<uint8_t> serialize(const ParamSet& p, const UserSecretKey& sk) {
  auto out = header(FileKind::kSK, p);
  put_identity(out, sk.id);
  put_int(out, sk.e.matrix());
  put_int(out, sk.e_prime.matrix());
  return out;
}

std::vector<uint8_t> serialize(const ParamSet& p, const Ciphertext& ct, uint64_t message_bits) {
  check_dims(p, ct);
  auto out = header(FileKind::kCT, p);
  append_u64(out, message_bits);
  put_int(out, ct.r);
  put_zq(out, ct.c1.entries());
  put_zq(out, ct.c2.entries());
  put_zq(out, ct.c3.entries());
  put_zq(out, ct.c4.entries());
  put_bits(out, ct.c5);
  return out;
}

std::vector<uint8_t> serialize(const ParamSet& p, const TrapdoorT1& td) {
  auto out = header(FileKind::kTD1, p);
  put_td1(out, td);
  return out;
}

std::vector<uint8_t> serialize(const ParamSet& p, const TrapdoorT2& td) {
  auto out = header(FileKind::kTD2, p);
  put_td2(out, td);
  return out;
}

std::vector<uint8_t> serialize(const ParamSet& p, const TrapdoorT3& td) {
  auto out = header(FileKind::kTD3, p);
  if (const auto* basis = std::get_if<TrapdoorT1>(&td.payload)) {
    out.push_back(1);
    put_td1(out, *basis);
  } else {
    out.push_back(2);
    put_td2(out, std::get<TrapdoorT2>(td.payload));
  }
  return out;
}

PublicParams deserialize_pp(std::span<const uint8_t> bytes) {
  auto [info, r] = open(bytes, FileKind::kPP, nullptr);
  const ParamSet& p = info.params;
  check_size(r, 8 * ((u128(p.ell) + 3) * p.m * p.n + u128(p.n) * p.t));
  const Modulus q(p.q);
  ZqMatrix a = r.zq_matrix(q, p.n, p.m);
  ZqMatrix a_prime = r.zq_matrix(q, p.n, p.m);
  std::vector<ZqMatrix> a_list;
  a_list.reserve(p.ell);
  for (uint64_t i = 0; i < p.ell; ++i) a_list.push_back(r.zq_matrix(q, p.n, p.m));
  ZqMatrix b = r.zq_matrix(q, p.n, p.m);
  ZqMatrix u = r.zq_matrix(q, p.n, p.t);
  return PublicParams{p, std::move(a), std::move(a_prime), std::move(a_list), std::move(b), std::move(u)};
}

MasterSecretKey deserialize_msk(std::span<const uint8_t> bytes, const ParamSet& expected) {
  auto [info, r] = open(bytes, FileKind::kMSK, &expected);
  const uint64_t m = info.params.m;
  check_size(r, 8 * 2 * u128(m) * m);
  IntMatrix t_a = r.int_matrix(m, m);
  IntMatrix t_a_prime = r.int_matrix(m, m);
  return MasterSecretKey{ShortBasis(std::move(t_a)), ShortBasis(std::move(t_a_prime))};
}

UserSecretKey deserialize_sk(std::span<const uint8_t> bytes, const ParamSet& expected) {
  auto [info, r] = open(bytes, FileKind::kSK, &expected);
  const ParamSet& p = info.params;
  check_size(r, 8 * (u128(p.ell) + 8 * u128(p.m) * p.m));
  Identity id = r.identity(p.ell);
  IntMatrix e = r.int_matrix(2 * p.m, 2 * p.m);
  IntMatrix e_prime = r.int_matrix(2 * p.m, 2 * p.m);
  return UserSecretKey{std::move(id), ShortBasis(std::move(e)), ShortBasis(std::move(e_prime))};
}

StoredCiphertext deserialize_ct(std::span<const uint8_t> bytes, const ParamSet& expected) {
  auto [info, r] = open(bytes, FileKind::kCT, &expected);
  const ParamSet& p = info.params;
  check_size(r, kCtPrefixBytes + 8 * (u128(p.m) * p.m + 2 * u128(p.t) + 6 * u128(p.m)) + (p.lambda + 7) / 8);
  const uint64_t message_bits = r.u64();
  if (message_bits > p.t) fail("recorded message length exceeds t");
  const Modulus q(p.q);
  IntMatrix rm = r.int_matrix(p.m, p.m);
  if (static_cast<uint64_t>(rm.max_abs()) > p.ell) fail("tag matrix entry outside [-ell, ell]");
  ZqVector c1 = r.zq_vector(q, p.t);
  ZqVector c2 = r.zq_vector(q, p.t);
  ZqVector c3 = r.zq_vector(q, 3 * p.m);
  ZqVector c4 = r.zq_vector(q, 3 * p.m);
  BitString c5 = r.bits(p.lambda);
  return {Ciphertext{std::move(rm), std::move(c1), std::move(c2), std::move(c3), std::move(c4), std::move(c5)},
          message_bits};
}

TrapdoorT1 deserialize_td1(std::span<const uint8_t> bytes, const ParamSet& expected) {
  auto [info, r] = open(bytes, FileKind::kTD1, &expected);
  const ParamSet& p = info.params;
  check_size(r, 8 * (u128(p.ell) + 4 * u128(p.m) * p.m));
  return read_td1(r, p);
}

TrapdoorT2 deserialize_td2(std::span<const uint8_t> bytes, const ParamSet& expected) {
  auto [info, r] = open(bytes, FileKind::kTD2, &expected);
  const ParamSet& p = info.params;
  check_size(r, 8 * (u128(p.ell) + 3 * u128(p.m) * p.t) + (p.lambda + 7) / 8);
  return read_td2(r, p);
}

TrapdoorT3 deserialize_td3(std::span<const uint8_t> bytes, const ParamSet& expected) {
  auto [info, r] = open(bytes, FileKind::kTD3, &expected);
  const ParamSet& p = info.params;
  const uint8_t tag = r.u8();
  if (tag == 1) {
    check_size(r, 8 * (u128(p.ell) + 4 * u128(p.m) * p.m));
    return TrapdoorT3{read_td1(r, p)};
  }
  if (tag == 2) {
    check_size(r, 8 * (u128(p.ell) + 3 * u128(p.m) * p.t) + (p.lambda + 7) / 8);
    return TrapdoorT3{read_td2(r, p)};
  }
  fail("unknown trapdoor variant " + std::to_string(tag));
}

}  // namespace ibeetfa
