#include "mkdvlab/rng.hpp"

#include <cmath>

namespace mkdvlab {

namespace {

constexpr std::uint32_t mult0 = 0xD2511F53u;
constexpr std::uint32_t mult1 = 0xCD9E8D57u;
constexpr std::uint32_t weyl0 = 0x9E3779B9u;
constexpr std::uint32_t weyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

double to_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(mult0, ctr[0], hi0, lo0);
    mulhilo(mult1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += weyl0;
    key[1] += weyl1;
  }
  return ctr;
}

std::pair<double, double> CounterRng::uniforms(std::uint64_t a, std::uint32_t b, std::uint32_t c) const {
  const auto out = philox4x32({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32), b, c}, key_);
  return {to_unit(out[0], out[1]), to_unit(out[2], out[3])};
}

cplx CounterRng::complex_normal(std::uint64_t a, std::uint32_t b, std::uint32_t c) const {
  const auto [u1, u2] = uniforms(a, b, c);
  // |g|^2 = -log(u1) is Exp(1); the phase is uniform.
  return std::polar(std::sqrt(-std::log(u1)), two_pi * u2);
}

}  // namespace mkdvlab
