#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace ibeetfa {

// Seedable deterministic byte stream: ChaCha20 keystream keyed by
// SHA-256(seed). Identical seeds give identical streams. Single owner; not
// safe for concurrent use.
class RandomSource {
 public:
  explicit RandomSource(std::span<const uint8_t> seed);
  explicit RandomSource(std::string_view seed);
  explicit RandomSource(uint64_t seed);
  // Seeded from the operating system.
  static RandomSource from_entropy();

  void fill(std::span<uint8_t> out);
  uint64_t next_u64();
  // Uniform in [0, bound), bound > 0, by rejection.
  uint64_t uniform_below(uint64_t bound);
  // Uniform in [0, 1) with 53 random bits.
  double uniform_double();
  // Uniform in (0, 1].
  double uniform_open_closed() { return 1.0 - uniform_double(); }
  bool bit();
  // Standard normal, Box-Muller.
  double normal();

 private:
  void refill();

  std::array<uint8_t, 32> key_{};
  uint64_t block_counter_ = 0;
  std::vector<uint8_t> buffer_;
  size_t pos_ = 0;
  uint64_t bit_pool_ = 0;
  int bits_left_ = 0;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace ibeetfa
