#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace taskgame {

/// Seeded generator with platform-independent draws. The engine is
/// mt19937_64; uniform doubles and bounded integers are derived here rather
/// than through the implementation-defined std distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  /// Independent stream for (seed, label), so distinct consumers of one run
  /// seed never share draws.
  static Rng substream(std::uint64_t seed, std::string_view label);

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform in [0, n), n > 0.
  std::uint64_t index(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace taskgame
