#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace semimed {

inline std::uint64_t hash_mix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Deterministic substream seed from a master seed and up to two stream tags.
// Replicate r of task "tag" always sees the same stream regardless of thread
// scheduling, which keeps parallel and serial runs bit-identical.
inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t tag,
                                    std::uint64_t index = 0) {
  std::uint64_t s = hash_mix64(master + 0x9E3779B97F4A7C15ULL);
  s = hash_mix64(s ^ (tag + 0xD1B54A32D192ED03ULL));
  s = hash_mix64(s ^ (index + 0x8CB92BA72F3D8DD7ULL));
  return s;
}

// Stream tags for the independent random-number consumers.
inline constexpr std::uint64_t kStreamGenerate = 1;
inline constexpr std::uint64_t kStreamBootstrap = 2;

// mt19937_64 with hand-rolled distributions; the standard distribution
// objects are implementation-defined, these are reproducible everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // uniform on (0, 1), endpoints excluded
  double uniform() {
    return (static_cast<double>(eng_() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
  }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  double exponential() { return -std::log(uniform()); }
  bool bernoulli(double p) { return uniform() < p; }

  // unbiased integer in [0, n)
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = eng_();
    } while (x >= limit);
    return x % n;
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace semimed
