#pragma once

#include <array>
#include <cstdint>
#include <utility>

#include "mkdvlab/spectral_field.hpp"

namespace mkdvlab {

/// Philox4x32-10 block: a keyed bijection on 128-bit counters.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

/// Counter-based stream keyed by a 64-bit seed. Every draw is a pure function of
/// (seed, a, b, c); no state is carried between draws.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

  /// Two uniforms in (0, 1) with 53-bit resolution.
  std::pair<double, double> uniforms(std::uint64_t a, std::uint32_t b, std::uint32_t c = 0) const;

  /// Complex standard Gaussian: E g = 0, E|g|^2 = 1, E g^2 = 0 (Box-Muller).
  cplx complex_normal(std::uint64_t a, std::uint32_t b, std::uint32_t c = 0) const;

 private:
  std::array<std::uint32_t, 2> key_;
};

}  // namespace mkdvlab
