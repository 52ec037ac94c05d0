#pragma once

#include <random>

#include "mkdvlab/spectral_field.hpp"

namespace testutil {

using mkdvlab::cplx;
using mkdvlab::SpectralField;

/// Random band-N field with coefficients decaying like 1/<n>, from a fixed-seed engine.
inline SpectralField random_field(int N, unsigned seed, double scale = 1.0) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  SpectralField u(N);
  for (int n = -N; n <= N; ++n) u.at(n) = scale * cplx(g(gen), g(gen)) / mkdvlab::bracket(n);
  return u;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace testutil
