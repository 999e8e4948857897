#include "ibeetfa/random.hpp"

#include <cmath>
#include <cstring>
#include <memory>
#include <numbers>

#include <openssl/evp.h>
#include <openssl/rand.h>
#include <openssl/sha.h>

#include "ibeetfa/error.hpp"

namespace ibeetfa {

namespace {

constexpr size_t kBufferBytes = 4096;

}  // namespace

RandomSource::RandomSource(std::span<const uint8_t> seed) {
  SHA256(seed.data(), seed.size(), key_.data());
}

RandomSource::RandomSource(std::string_view seed)
    : RandomSource(std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(seed.data()), seed.size())) {}

RandomSource::RandomSource(uint64_t seed) {
  std::array<uint8_t, 8> le{};
  for (int i = 0; i < 8; ++i) le[i] = static_cast<uint8_t>(seed >> (8 * i));
  SHA256(le.data(), le.size(), key_.data());
}

RandomSource RandomSource::from_entropy() {
  std::array<uint8_t, 32> seed{};
  if (RAND_bytes(seed.data(), static_cast<int>(seed.size())) != 1) {
    throw Error(ErrorCode::kSamplingFailed, "operating system entropy unavailable");
  }
  return RandomSource(std::span<const uint8_t>(seed));
}

void RandomSource::refill() {
  // Each refill uses a fresh 16-byte IV (32-bit block counter || nonce) so the
  // keystream never repeats.
  std::array<uint8_t, 16> iv{};
  const uint64_t chunk = block_counter_++;
  for (int i = 0; i < 8; ++i) iv[8 + i] = static_cast<uint8_t>(chunk >> (8 * i));
  std::unique_ptr<EVP_CIPHER_CTX, decltype(&EVP_CIPHER_CTX_free)> ctx(EVP_CIPHER_CTX_new(),
                                                                      EVP_CIPHER_CTX_free);
  buffer_.assign(kBufferBytes, 0);
  int len = 0;
  if (!ctx || EVP_EncryptInit_ex(ctx.get(), EVP_chacha20(), nullptr, key_.data(), iv.data()) != 1 ||
      EVP_EncryptUpdate(ctx.get(), buffer_.data(), &len, buffer_.data(),
                        static_cast<int>(buffer_.size())) != 1) {
    throw Error(ErrorCode::kSamplingFailed, "ChaCha20 keystream generation failed");
  }
  pos_ = 0;
}

void RandomSource::fill(std::span<uint8_t> out) {
  size_t done = 0;
  while (done < out.size()) {
    if (pos_ >= buffer_.size()) refill();
    const size_t n = std::min(out.size() - done, buffer_.size() - pos_);
    std::memcpy(out.data() + done, buffer_.data() + pos_, n);
    pos_ += n;
    done += n;
  }
}

uint64_t RandomSource::next_u64() {
  std::array<uint8_t, 8> b{};
  fill(b);
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
  return v;
}

uint64_t RandomSource::uniform_below(uint64_t bound) {
  if (bound == 0) throw Error(ErrorCode::kInvalidArgument, "uniform_below(0)");
  const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  for (;;) {
    const uint64_t v = next_u64();
    if (v < limit) return v % bound;
  }
}

double RandomSource::uniform_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

bool RandomSource::bit() {
  if (bits_left_ == 0) {
    bit_pool_ = next_u64();
    bits_left_ = 64;
  }
  const bool b = (bit_pool_ & 1) != 0;
  bit_pool_ >>= 1;
  --bits_left_;
  return b;
}

double RandomSource::normal() {
  if (has_spare_normal_) {
    has_spare_normal_ = false;
    return spare_normal_;
  }
  const double u1 = uniform_open_closed();
  const double u2 = uniform_double();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_normal_ = r * std::sin(theta);
  has_spare_normal_ = true;
  return r * std::cos(theta);
}

}  // namespace ibeetfa
