#pragma once

#include <cstdint>
#include <cmath>
#include <string_view>

namespace kpirl {

// Counter-free splitmix64 generator. We roll our own instead of using the
// <random> distributions so that every stream of draws is bit-identical
// across standard libraries and rebuilds, which the file-output determinism
// contract depends on.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n). n must be positive.
  std::uint64_t uniform_index(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // Standard normal via Box-Muller. The sine half is discarded so the
  // stream stays stateless beyond the counter.
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

 private:
  std::uint64_t state_;
};

// FNV-1a over a label, used to derive per-stage and per-item seeds from one
// master seed: derive_seed(master, "learn") etc. Documented in the README.
inline std::uint64_t hash_label(std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t derive_seed(std::uint64_t master, std::string_view label) {
  // Mix rather than xor alone so label collisions with master bits are
  // scrambled through the splitmix finalizer.
  Rng mixer(master ^ hash_label(label));
  return mixer.next_u64();
}

}  // namespace kpirl
