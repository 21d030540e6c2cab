#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace vorres {

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derives an independent stream seed from a root seed and a path of stream
// labels, e.g. derive_seed(root, {kReplicate, r}). Streams never depend on
// which thread consumes them.
constexpr std::uint64_t derive_seed(std::uint64_t root,
                                    std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = mix64(root);
  for (std::uint64_t v : path) h = mix64(h ^ mix64(v ^ 0x5851f42d4c957f2dULL));
  return h;
}

// Stream labels used across the library.
namespace stream {
inline constexpr std::uint64_t kReplicate = 1;
inline constexpr std::uint64_t kNullSimulation = 2;
inline constexpr std::uint64_t kPitNoise = 3;
inline constexpr std::uint64_t kStart = 4;
inline constexpr std::uint64_t kHistogram = 5;
inline constexpr std::uint64_t kEnvelope = 6;
inline constexpr std::uint64_t kJitter = 7;
}  // namespace stream

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  // Uniform on (0, 1).
  double uniform_open() {
    double u;
    do u = uniform();
    while (u == 0.0);
    return u;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  long poisson(double mean) {
    if (!(mean > 0.0)) return 0;
    return std::poisson_distribution<long>(mean)(engine_);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

// Single uniform draw tied to a stream; used for per-region PIT noise.
inline double stream_uniform(std::uint64_t seed, std::uint64_t index) {
  return static_cast<double>(derive_seed(seed, {stream::kPitNoise, index}) >> 11) *
         0x1.0p-53;
}

}  // namespace vorres
