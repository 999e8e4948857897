#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "ibeetfa/authz.hpp"
#include "ibeetfa/params.hpp"
#include "ibeetfa/scheme.hpp"

namespace ibeetfa {

// File layout: "IBFA" | u16 version | u8 kind | 32-byte SHA-256 of the
// encoded ParamSet | ParamSet (9 x 64-bit LE) | kind-specific prefix | payload.
// All integers little-endian; Zq entries as residues, IntMatrix entries as
// two's complement, row-major.
enum class FileKind : uint8_t { kPP = 1, kMSK = 2, kSK = 3, kCT = 4, kTD1 = 5, kTD2 = 6, kTD3 = 7 };

inline constexpr std::array<uint8_t, 4> kMagic = {'I', 'B', 'F', 'A'};
inline constexpr uint16_t kFormatVersion = 1;
inline constexpr size_t kHeaderBytes = 4 + 2 + 1 + 32;
inline constexpr size_t kParamBytes = 9 * 8;
// CT files carry the true message length in bits ahead of the payload.
inline constexpr size_t kCtPrefixBytes = 8;

const char* file_kind_name(FileKind k);

std::vector<uint8_t> encode_params(const ParamSet& p);
std::array<uint8_t, 32> params_fingerprint(const ParamSet& p);

struct FileInfo {
  FileKind kind;
  ParamSet params;
};

// Parses and checks header and parameter block only.
FileInfo peek_file(std::span<const uint8_t> bytes);

std::vector<uint8_t> serialize(const PublicParams& pp);
std::vector<uint8_t> serialize(const ParamSet& p, const MasterSecretKey& msk);
std::vector<uint8_t> serialize(const ParamSet& p, const UserSecretKey& sk);
std::vector<uint8_t> serialize(const ParamSet& p, const Ciphertext& ct, uint64_t message_bits);
std::vector<uint8_t> serialize(const ParamSet& p, const TrapdoorT1& td);
std::vector<uint8_t> serialize(const ParamSet& p, const TrapdoorT2& td);
std::vector<uint8_t> serialize(const ParamSet& p, const TrapdoorT3& td);

PublicParams deserialize_pp(std::span<const uint8_t> bytes);
// The remaining loaders reject files whose fingerprint differs from `expected`.
MasterSecretKey deserialize_msk(std::span<const uint8_t> bytes, const ParamSet& expected);
UserSecretKey deserialize_sk(std::span<const uint8_t> bytes, const ParamSet& expected);

struct StoredCiphertext {
  Ciphertext ct;
  uint64_t message_bits;
};
StoredCiphertext deserialize_ct(std::span<const uint8_t> bytes, const ParamSet& expected);
TrapdoorT1 deserialize_td1(std::span<const uint8_t> bytes, const ParamSet& expected);
TrapdoorT2 deserialize_td2(std::span<const uint8_t> bytes, const ParamSet& expected);
TrapdoorT3 deserialize_td3(std::span<const uint8_t> bytes, const ParamSet& expected);

}  // namespace ibeetfa
