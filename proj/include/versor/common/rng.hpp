#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace versor {

// Deterministic random source. std::mt19937_64 has a fixed bit stream across
// platforms; the distributions below are hand-rolled because the standard
// distribution objects are implementation-defined and would break seed
// reproducibility between toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed), seed_mix_(splitmix(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of mantissa.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // lo..hi inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(engine_() % span);
  }

  // Standard normal via the Marsaglia polar method; one spare cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = uniform(-1.0, 1.0);
      v = uniform(-1.0, 1.0);
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double scale = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * scale;
    has_spare_ = true;
    return u * scale;
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Independent stream for a sub-task (dataset item, retry attempt, ...).
  Rng fork(std::uint64_t salt) const {
    return Rng(splitmix(seed_mix_ ^ (0x9e3779b97f4a7c15ull * (salt + 1))));
  }

  // Stable derived seed value, for recording per-item seeds in artifacts.
  static std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt) {
    return splitmix(splitmix(base) ^ (0x9e3779b97f4a7c15ull * (salt + 1)));
  }

 private:
  static std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  std::mt19937_64 engine_;
  std::uint64_t seed_mix_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace versor
