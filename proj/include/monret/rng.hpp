#pragma once

#include <cstdint>
#include <random>

namespace monret {

// SplitMix64 finalizer. Used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// A random stream: a 64-bit Mersenne twister seeded from a (master seed,
// stream index) pair. Streams with distinct indices are statistically
// independent, so work split into indexed chunks is reproducible regardless of
// how the chunks are scheduled onto threads.
class RandomStream {
 public:
  using engine_type = std::mt19937_64;

  explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream) {
    std::seed_seq seq{lo(splitmix64(seed)), hi(splitmix64(seed)),
                      lo(splitmix64(seed ^ splitmix64(stream + 1))),
                      hi(splitmix64(seed ^ splitmix64(stream + 1)))};
    engine_.seed(seq);
  }

  // Child stream `index` of this stream.
  RandomStream split(std::uint64_t index) const {
    return RandomStream(splitmix64(seed_ ^ splitmix64(stream_ + 0x51ed27ULL)), index);
  }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  engine_type& engine() noexcept { return engine_; }

  // Uniform double in [0, 1).
  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

 private:
  static std::uint32_t lo(std::uint64_t v) { return static_cast<std::uint32_t>(v); }
  static std::uint32_t hi(std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); }

  std::uint64_t seed_;
  std::uint64_t stream_;
  engine_type engine_;
};

}  // namespace monret
