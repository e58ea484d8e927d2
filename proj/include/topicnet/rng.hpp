#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace topicnet {

/// SplitMix64 finalizer; used to derive independent stream seeds from one user seed.
std::uint64_t mix_seed(std::uint64_t x);

/// Seed of stream `stream` under master seed `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Deterministic random source. The engine's output sequence is fixed by the C++ standard and
/// every distribution below is written out explicitly, so draws are identical across platforms
/// and standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform01();
  /// Uniform on [lo, hi); returns lo exactly when lo == hi.
  double uniform(double lo, double hi);
  /// Uniform integer on the closed range [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  /// Standard normal via Box-Muller (one draw per pair of uniforms, no caching).
  double normal();
  bool bernoulli(double p);
  /// `count` distinct indices from [0, population), in draw order (partial Fisher-Yates).
  std::vector<std::size_t> sample_without_replacement(std::size_t population, std::size_t count);

 private:
  std::mt19937_64 engine_;
};

}  // namespace topicnet
