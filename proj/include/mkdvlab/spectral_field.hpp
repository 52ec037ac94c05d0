#pragma once

#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace mkdvlab {

using cplx = std::complex<double>;

inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr double infinity = std::numeric_limits<double>::infinity();

/// Japanese bracket <x> = sqrt(1 + x^2).
inline double bracket(double x) { return std::sqrt(1.0 + x * x); }

/// Raised when a grid is too coarse to represent the requested band without wrap-around.
struct aliasing_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Fourier coefficients of a complex field on the torus R/2piZ,
/// u(x) = sum_{|n| <= N} c_n e^{inx}. Storage index of frequency n is n + N.
class SpectralField {
 public:
  SpectralField() : SpectralField(0) {}
  explicit SpectralField(int max_freq);
  SpectralField(int max_freq, std::vector<cplx> coeffs);

  /// c e^{inx} in a container of band max_freq.
  static SpectralField mode(int max_freq, int n, cplx c);

  int max_freq() const noexcept { return max_freq_; }
  std::size_t size() const noexcept { return coeffs_.size(); }

  /// Coefficient at frequency n; zero outside the band.
  cplx operator[](int n) const noexcept {
    return (n < -max_freq_ || n > max_freq_) ? cplx{} : coeffs_[static_cast<std::size_t>(n + max_freq_)];
  }
  /// Mutable coefficient at frequency n; throws outside the band.
  cplx& at(int n);

  std::span<const cplx> coeffs() const noexcept { return coeffs_; }
  std::span<cplx> coeffs() noexcept { return coeffs_; }

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(cplx scale);

  bool operator==(const SpectralField&) const = default;

 private:
  int max_freq_;
  std::vector<cplx> coeffs_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(cplx scale, SpectralField a);

/// Copy into a container of band max_freq, zero padding or dropping modes.
SpectralField resized(const SpectralField& u, int max_freq);

/// sqrt(sum |c_n|^2), the plain coefficient l2 norm.
double coeff_norm(const SpectralField& u);
/// coeff_norm(a - b) without requiring equal containers.
double coeff_distance(const SpectralField& a, const SpectralField& b);

/// Dirichlet projection onto |n| <= K. The result has band min(K, N) unless keep_size is set.
SpectralField project_low(const SpectralField& u, int K, bool keep_size = false);
/// u - project_low(u, K), in the container of u.
SpectralField project_high(const SpectralField& u, int K);

/// Physical samples u(x_m) at x_m = 2 pi m / M.
struct GridField {
  std::vector<cplx> samples;
  int size() const noexcept { return static_cast<int>(samples.size()); }
};

/// Zero-pads to an M-point grid and synthesizes. Requires M >= 2N+1.
GridField to_grid(const SpectralField& u, int M);
/// Analyzes grid samples and keeps |n| <= N. Requires N <= (M-1)/2.
SpectralField from_grid(const GridField& g, int N);

/// Regularity and integrability indices of FL^{s,p} and X^{s,b}_{p,q}.
struct NormSpec {
  double s = 0.0;
  double p = 2.0;
  std::optional<double> b;
  std::optional<double> q;

  void validate() const;
};

/// (sum <n>^{sp} |c_n|^p)^{1/p}; sup_n <n>^s |c_n| for p = infinity.
double fl_norm(const SpectralField& u, const NormSpec& spec);

/// (2 pi sum <n>^{2s} |c_n|^2)^{1/2}.
double sobolev_norm(const SpectralField& u, double s);

struct QuadratureValue {
  double value = 0.0;
  bool exact = true;  // false when M is below the exactness threshold for |u|^p
};

/// ((2 pi / M) sum_m |u(x_m)|^p)^{1/p}. Exact for even integer p when M >= pN + 1.
QuadratureValue lp_physical_norm(const SpectralField& u, double p, int M);

/// k-th derivative: c_n -> (in)^k c_n.
SpectralField derivative(const SpectralField& u, int order);

/// Fourier multiplier <n>^s.
SpectralField bessel_potential(const SpectralField& u, double s);

/// Time-stamped states of a flow, all in the same container.
struct Trajectory {
  std::vector<double> times;
  std::vector<SpectralField> states;

  void validate() const;
  std::size_t size() const noexcept { return times.size(); }
};

/// Discrete proxy for the X^{s,b}_{p,q} norm over [t0, t1]: Hann-windowed time transform per
/// spatial mode, weight <n>^s <tau - n^3>^b, L^q over the discrete tau grid, then l^p over n.
/// Needs spec.b and spec.q and a uniform time grid.
double xsb_norm(const Trajectory& traj, const NormSpec& spec, double t0, double t1);

/// Per-mode windowed time transform used by xsb_norm. Returns (tau grid, |transform| per tau).
struct ModeSpectrum {
  std::vector<double> tau;
  std::vector<double> magnitude;
};
ModeSpectrum windowed_mode_spectrum(const Trajectory& traj, int n, double t0, double t1);

}  // namespace mkdvlab
