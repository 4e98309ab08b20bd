#pragma once

// Counter-based randomness: Philox4x32-10 keyed by a per-path seed. Any draw
// is addressable by (stream, index), so a path can be resumed or replayed
// from any step without replaying the generator.

#include <array>
#include <cstdint>
#include <limits>

namespace hyperwind {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Per-path seed derived from the master seed and the path index.
inline constexpr std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master ^ splitmix64(index ^ 0x632BE59BD9B4E019ULL));
}

struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr Counter generate(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += 0x9E3779B9U;
        key[1] += 0xBB67AE85U;
      }
      const std::uint64_t p0 = std::uint64_t{0xD2511F53U} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{0xCD9E8D57U} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    }
    return ctr;
  }
};

/// Random stream identifiers; each stream is an independent sequence.
enum class Stream : std::uint32_t { steps = 0, jitter = 1, bank = 2, bootstrap = 3 };

/// 32-bit draws addressed by index, cached one Philox block at a time.
class CounterStream {
 public:
  CounterStream(std::uint64_t seed, Stream stream)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_(static_cast<std::uint32_t>(stream)) {}

  std::uint32_t at(std::uint64_t index) {
    const std::uint64_t block = index >> 2;
    if (block != cached_block_) {
      cache_ = Philox4x32::generate(
          {static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32), stream_, 0}, key_);
      cached_block_ = block;
    }
    return cache_[index & 3];
  }

 private:
  Philox4x32::Key key_;
  std::uint32_t stream_;
  std::uint64_t cached_block_ = std::numeric_limits<std::uint64_t>::max();
  Philox4x32::Counter cache_{};
};

/// Sequential engine over a counter stream; satisfies UniformRandomBitGenerator.
class CounterEngine {
 public:
  using result_type = std::uint32_t;
  CounterEngine(std::uint64_t seed, Stream stream) : stream_(seed, stream) {}
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return stream_.at(next_++); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() {
    const std::uint64_t hi = (*this)();
    const std::uint64_t lo = (*this)();
    return static_cast<double>(((hi << 32) | lo) >> 11) * 0x1.0p-53;
  }

 private:
  CounterStream stream_;
  std::uint64_t next_ = 0;
};

}  // namespace hyperwind
