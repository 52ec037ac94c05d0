#include "mkdvlab/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <string>

namespace mkdvlab {

int next_fast_size(int n) {
  if (n <= 1) return 1;
  for (int m = n;; ++m) {
    int r = m;
    for (int f : {2, 3, 5, 7})
      while (r % f == 0) r /= f;
    if (r == 1) return m;
  }
}

namespace {

// FFTW planning is not thread-safe; execution of an existing plan on fresh arrays is.
struct PlanPair {
  fftw_plan synth = nullptr;
  fftw_plan analyze = nullptr;
};

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

PlanPair plans_for(int M) {
  static std::map<int, PlanPair> cache;
  std::lock_guard lock(plan_mutex());
  auto it = cache.find(M);
  if (it != cache.end()) return it->second;
  fftw_complex* a = fftw_alloc_complex(static_cast<std::size_t>(M));
  fftw_complex* b = fftw_alloc_complex(static_cast<std::size_t>(M));
  PlanPair p;
  p.synth = fftw_plan_dft_1d(M, a, b, FFTW_BACKWARD, FFTW_ESTIMATE);
  p.analyze = fftw_plan_dft_1d(M, a, b, FFTW_FORWARD, FFTW_ESTIMATE);
  fftw_free(a);
  fftw_free(b);
  cache.emplace(M, p);
  return p;
}

}  // namespace

struct GridTransform::Impl {
  int M;
  PlanPair plans;
  fftw_complex* in;
  fftw_complex* out;

  explicit Impl(int m) : M(m), plans(plans_for(m)) {
    in = fftw_alloc_complex(static_cast<std::size_t>(M));
    out = fftw_alloc_complex(static_cast<std::size_t>(M));
  }
  ~Impl() {
    fftw_free(in);
    fftw_free(out);
  }
  cplx* in_c() { return reinterpret_cast<cplx*>(in); }
  cplx* out_c() { return reinterpret_cast<cplx*>(out); }
};

GridTransform::GridTransform(int M) {
  if (M < 1) throw std::invalid_argument("GridTransform: grid size must be positive");
  impl_ = std::make_unique<Impl>(M);
}
GridTransform::~GridTransform() = default;
GridTransform::GridTransform(GridTransform&&) noexcept = default;
GridTransform& GridTransform::operator=(GridTransform&&) noexcept = default;

int GridTransform::size() const noexcept { return impl_->M; }

void GridTransform::synthesize(std::span<const cplx> coeffs, int max_freq, std::span<cplx> out) {
  const int M = impl_->M;
  if (M < 2 * max_freq + 1)
    throw aliasing_error("synthesize: grid of " + std::to_string(M) + " points cannot hold band " +
                         std::to_string(max_freq));
  cplx* buf = impl_->in_c();
  const auto K = static_cast<std::size_t>(max_freq);
  std::copy(coeffs.begin() + K, coeffs.begin() + 2 * K + 1, buf);
  std::fill(buf + K + 1, buf + M - K, cplx{});
  std::copy(coeffs.begin(), coeffs.begin() + K, buf + M - K);
  fftw_execute_dft(impl_->plans.synth, impl_->in, impl_->out);
  std::copy(impl_->out_c(), impl_->out_c() + M, out.begin());
}

void GridTransform::analyze(std::span<const cplx> samples, int max_freq, std::span<cplx> coeffs) {
  const int M = impl_->M;
  if (M < 2 * max_freq + 1)
    throw aliasing_error("analyze: grid of " + std::to_string(M) + " points cannot resolve band " +
                         std::to_string(max_freq));
  std::copy(samples.begin(), samples.begin() + M, impl_->in_c());
  fftw_execute_dft(impl_->plans.analyze, impl_->in, impl_->out);
  const cplx* res = impl_->out_c();
  const double scale = 1.0 / M;
  const auto K = static_cast<std::size_t>(max_freq);
  for (std::size_t k = 0; k < K; ++k) coeffs[k] = res[M - K + k] * scale;
  for (std::size_t k = 0; k <= K; ++k) coeffs[K + k] = res[k] * scale;
}

}  // namespace mkdvlab
