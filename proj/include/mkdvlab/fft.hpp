#pragma once

#include <memory>
#include <span>

#include "mkdvlab/spectral_field.hpp"

namespace mkdvlab {

/// Smallest n' >= n whose prime factors are all in {2, 3, 5, 7}.
int next_fast_size(int n);

/// M-point transforms between band-limited coefficients and grid samples.
/// Plans are shared through a process-wide cache; each instance owns its own aligned
/// buffers, so one instance per thread.
class GridTransform {
 public:
  explicit GridTransform(int M);
  ~GridTransform();
  GridTransform(GridTransform&&) noexcept;
  GridTransform& operator=(GridTransform&&) noexcept;
  GridTransform(const GridTransform&) = delete;
  GridTransform& operator=(const GridTransform&) = delete;

  int size() const noexcept;

  /// out[m] = sum_n c_n e^{i n x_m}. Requires M >= 2 max_freq + 1.
  void synthesize(std::span<const cplx> coeffs, int max_freq, std::span<cplx> out);
  void synthesize(const SpectralField& u, std::span<cplx> out) {
    synthesize(u.coeffs(), u.max_freq(), out);
  }

  /// coeffs[n + N] = (1/M) sum_m f_m e^{-i n x_m} for |n| <= N. Requires M >= 2N + 1.
  void analyze(std::span<const cplx> samples, int max_freq, std::span<cplx> coeffs);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace mkdvlab
