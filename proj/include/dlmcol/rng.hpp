#pragma once

// Counter-based random streams.
//
// Every stochastic decision in the solver draws from a Philox4x32-10 stream
// (Salmon et al., SC'11) so that results do not depend on thread scheduling:
// a stream is fully determined by its 64-bit key and 128-bit counter.
//
// Stream derivation, bit-exact and language-neutral:
//
//   key     = mix(mix(mix(seed) ^ tag) ^ generation)        (64 bits, lo word = key[0])
//   counter = { block_lo, block_hi, index_lo, index_hi }    (block counts 128-bit draws)
//
// where mix is the SplitMix64 finalizer
//   z += 0x9E3779B97F4A7C15; z = (z ^ z>>30) * 0xBF58476D1CE4E5B9;
//   z = (z ^ z>>27) * 0x94D049BB133111EB; z ^= z>>31.
//
// Each 128-bit Philox block yields two 64-bit outputs: (x1<<32|x0), then (x3<<32|x2).
// uniform(n) uses Lemire's multiply-shift with rejection; uniform01() takes the
// top 53 bits.

#include <array>
#include <cstdint>
#include <limits>

namespace dlmcol {

/// Purpose tags separating the independent streams of one run.
enum class StreamTag : std::uint64_t {
  init = 1,
  local_search = 2,
  crossover = 3,
  selection = 4,
  training = 5,
  network_init = 6,
  test = 99,
};

constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;

  static constexpr std::uint32_t kMulA = 0xD2511F53;
  static constexpr std::uint32_t kMulB = 0xCD9E8D57;
  static constexpr std::uint32_t kWeylA = 0x9E3779B9;
  static constexpr std::uint32_t kWeylB = 0xBB67AE85;
  static constexpr int kRounds = 10;

  static constexpr Block encrypt(Block ctr, std::array<std::uint32_t, 2> key) noexcept {
    for (int r = 0; r < kRounds; ++r) {
      const std::uint64_t p0 = static_cast<std::uint64_t>(kMulA) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kMulB) * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
      key[0] += kWeylA;
      key[1] += kWeylB;
    }
    return ctr;
  }
};

/// A single random stream. Satisfies UniformRandomBitGenerator, but the solver
/// only uses the portable helpers below (std distributions are not bit-exact
/// across standard libraries).
class Rng {
 public:
  using result_type = std::uint64_t;

  Rng() : Rng(0, 0) {}
  Rng(std::uint64_t key, std::uint64_t index) noexcept
      : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)},
        index_(index) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const Philox4x32::Block ctr{static_cast<std::uint32_t>(block_),
                                static_cast<std::uint32_t>(block_ >> 32),
                                static_cast<std::uint32_t>(index_),
                                static_cast<std::uint32_t>(index_ >> 32)};
    ++block_;
    const auto out = Philox4x32::encrypt(ctr, key_);
    spare_ = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
    have_spare_ = true;
    return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
  }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t uniform(std::uint64_t n) noexcept {
    std::uint64_t x = (*this)();
    auto m = static_cast<unsigned __int128>(x) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        x = (*this)();
        m = static_cast<unsigned __int128>(x) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  int uniform_int(int n) noexcept { return static_cast<int>(uniform(static_cast<std::uint64_t>(n))); }

  /// Uniform integer in [lo, hi].
  int uniform_range(int lo, int hi) noexcept { return lo + uniform_int(hi - lo + 1); }

  /// Uniform double in [0, 1).
  double uniform01() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  std::uint64_t blocks_used() const noexcept { return block_; }

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint64_t index_;
  std::uint64_t block_ = 0;
  std::uint64_t spare_ = 0;
  bool have_spare_ = false;
};

/// Independent stream for (seed, purpose, generation, individual index).
inline Rng make_stream(std::uint64_t seed, StreamTag tag, std::uint64_t index,
                       std::uint64_t generation = 0) noexcept {
  const std::uint64_t key =
      splitmix64(splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(tag)) ^ generation);
  return Rng(key, index);
}

/// Fisher-Yates with the portable uniform draw.
template <typename RandomIt>
void shuffle(RandomIt first, RandomIt last, Rng& rng) {
  const auto n = last - first;
  for (auto i = n - 1; i > 0; --i) {
    const auto j = static_cast<decltype(i)>(rng.uniform(static_cast<std::uint64_t>(i) + 1));
    using std::swap;
    swap(first[i], first[j]);
  }
}

}  // namespace dlmcol
