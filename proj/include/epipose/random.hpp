#pragma once

#include <cmath>
#include <cstdint>

namespace epipose {

// Deterministic, platform-independent random source.
//
// Standard-library distributions are not bit-portable across implementations,
// and reruns here must be byte-identical, so both the generator and every
// distribution transform are pinned:
//
//   state_{n+1} = state_n + 0x9E3779B97F4A7C15            (mod 2^64)
//   z = state_{n+1}
//   z = (z XOR (z >> 30)) * 0xBF58476D1CE4E5B9            (mod 2^64)
//   z = (z XOR (z >> 27)) * 0x94D049BB133111EB            (mod 2^64)
//   output_n = z XOR (z >> 31)
//
// (splitmix64). uniform() maps the top 53 bits onto [0, 1); normal() is the
// polar-free Box-Muller transform of two uniforms, returning the pair's
// values on alternate calls.
class PortableRng {
 public:
  explicit PortableRng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1), 53 bits of resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n). Modulo reduction: the bias for the n used
  // here (scene sizes, candidate counts) is far below 2^-50 and the simple
  // recurrence is part of the documented format.
  std::uint64_t bounded(std::uint64_t n) { return next_u64() % n; }

  // Standard normal via Box-Muller. u is nudged away from 0 so log() is safe.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u = uniform() + 0x1.0p-54;
    const double v = uniform();
    const double r = std::sqrt(-2.0 * std::log(u));
    const double a = 2.0 * 3.14159265358979323846 * v;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  // Derives an independent stream for item `index`; used to make per-item
  // work order-independent under any parallel schedule.
  static PortableRng for_item(std::uint64_t seed, std::uint64_t index) {
    PortableRng mix(seed ^ (0x9E3779B97F4A7C15ull * (index + 1)));
    // Burn one output so adjacent indices decorrelate.
    mix.next_u64();
    return mix;
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace epipose
