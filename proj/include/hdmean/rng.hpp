#pragma once

#include <cstdint>
#include <limits>
#include <vector>

namespace hdmean::rng {

// SplitMix64 finalizer: full-avalanche 64-bit mix.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Stream purposes keep replication draws, mean draws, dataset splits and
// sweep points on disjoint substreams of one master seed.
enum class Stream : std::uint64_t {
  Generic = 0,
  Replication = 1,
  MeanDraw = 2,
  Split = 3,
  Sweep = 4,
};

// Seed of substream `index` for `purpose` under `master`. Pure function, so
// any worker can reconstruct any replication's stream.
constexpr std::uint64_t substream_seed(std::uint64_t master, Stream purpose,
                                       std::uint64_t index) noexcept {
  return mix64(mix64(master) ^
               mix64(static_cast<std::uint64_t>(purpose) + 0x51a2b3c4d5e6f708ULL) ^
               mix64(index + 0x2545f4914f6cdd1dULL));
}

// xoshiro256++ (Blackman & Vigna), state filled from the seed by SplitMix64
// so that any 64-bit seed gives a well-mixed state. Satisfies
// std::uniform_random_bit_generator and is usable with <random> distributions.
class Xoshiro256pp {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256pp(std::uint64_t seed = 0) noexcept {
    std::uint64_t z = seed;
    for (auto& word : state_) {
      word = mix64(z);
      z += 0x9e3779b97f4a7c15ULL;
    }
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
};

using Engine = Xoshiro256pp;

// The one sanctioned way simulation code constructs generators.
inline Engine make_stream(std::uint64_t master, Stream purpose,
                          std::uint64_t index) noexcept {
  return Engine(substream_seed(master, purpose, index));
}

// k distinct indices drawn uniformly from {0, ..., n-1} via partial
// Fisher-Yates, returned sorted ascending.
std::vector<std::int64_t> sample_without_replacement(std::int64_t n,
                                                     std::int64_t k,
                                                     Engine& gen);

}  // namespace hdmean::rng
