#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace beamtrack {

/// Deterministic random stream with cheap substream derivation.
///
/// All simulation results are required to be byte-identical across reruns
/// and toolchains, so the variate transforms are pinned here instead of
/// relying on std::uniform_real_distribution / std::normal_distribution
/// (whose output is implementation-defined). Gaussians use the polar
/// Box-Muller form; complex normals follow the convention that
/// z ~ CN(0, s2) has independent real and imaginary parts of variance
/// s2/2 each, i.e. E|z|^2 = s2.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(mix(seed)) {}

  std::uint64_t seed() const { return seed_; }

  /// Fresh stream at `seed XOR index`; used for per-realization and
  /// per-trial streams so any realization can be regenerated in isolation.
  Rng substream(std::uint64_t index) const { return Rng(seed_ ^ index); }

  /// Uniform on [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal N(0, 1).
  double gaussian() {
    const double u1 = uniform_pos();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
  }

  /// Circularly-symmetric complex normal with E|z|^2 = sigma2.
  std::complex<double> cgaussian(double sigma2) {
    const double u1 = uniform_pos();
    const double u2 = uniform();
    const double r = std::sqrt(-sigma2 * std::log(u1));
    return {r * std::cos(two_pi * u2), r * std::sin(two_pi * u2)};
  }

 private:
  static constexpr double two_pi = 6.283185307179586476925286766559;

  /// Uniform on (0, 1]; safe as a log() argument.
  double uniform_pos() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  /// splitmix64 finalizer; decorrelates the XOR-derived substream seeds.
  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace beamtrack
