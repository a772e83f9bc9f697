// Part of the ncfact project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#ifndef NCFACT_RNG_HPP
#define NCFACT_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>

namespace ncfact {

/// Stateless 64-bit mixing step (splitmix64). Used both as a generator and to
/// derive independent substreams from (seed, salt...) tuples, so samples can be
/// drawn in any order or on any thread with identical results.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix_salt(std::uint64_t state, std::uint64_t salt) {
  std::uint64_t s = state ^ (salt + 0x9e3779b97f4a7c15ULL + (state << 6) + (state >> 2));
  return splitmix64_next(s);
}

/// Deterministic random stream. All distributions are implemented explicitly
/// (Box-Muller, rejection sampling) so output is identical across platforms
/// and standard-library versions.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : state_(seed) {}

  RandomStream(std::uint64_t seed, std::uint64_t salt1) : state_(mix_salt(seed, salt1)) {}

  RandomStream(std::uint64_t seed, std::uint64_t salt1, std::uint64_t salt2)
      : state_(mix_salt(mix_salt(seed, salt1), salt2)) {}

  RandomStream(std::uint64_t seed, std::uint64_t salt1, std::uint64_t salt2,
               std::uint64_t salt3)
      : state_(mix_salt(mix_salt(mix_salt(seed, salt1), salt2), salt3)) {}

  std::uint64_t next_u64() { return splitmix64_next(state_); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n), unbiased via rejection sampling.
  std::uint64_t uniform_below(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return v % n;
  }

  /// Standard normal via Box-Muller; consumes uniforms in pairs.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    // u1 = 0 would hit log(0); shift into (0, 1].
    u1 = 1.0 - u1;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  /// Standard complex normal: independent N(0, 1/2) real and imaginary parts.
  std::complex<double> complex_normal() {
    const double s = 0.70710678118654752440084436210485;
    double re = normal();
    double im = normal();
    return {re * s, im * s};
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace ncfact

#endif  // NCFACT_RNG_HPP
