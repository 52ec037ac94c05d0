#include "mkdvlab/spectral_field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mkdvlab/fft.hpp"

namespace mkdvlab {

SpectralField::SpectralField(int max_freq) : max_freq_(max_freq) {
  if (max_freq < 0) throw std::invalid_argument("SpectralField: negative max_freq");
  coeffs_.assign(static_cast<std::size_t>(2 * max_freq + 1), cplx{});
}

SpectralField::SpectralField(int max_freq, std::vector<cplx> coeffs)
    : max_freq_(max_freq), coeffs_(std::move(coeffs)) {
  if (max_freq < 0) throw std::invalid_argument("SpectralField: negative max_freq");
  if (coeffs_.size() != static_cast<std::size_t>(2 * max_freq + 1))
    throw std::invalid_argument("SpectralField: expected 2N+1 coefficients");
  for (const auto& c : coeffs_)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw std::invalid_argument("SpectralField: non-finite coefficient");
}

SpectralField SpectralField::mode(int max_freq, int n, cplx c) {
  SpectralField u(max_freq);
  u.at(n) = c;
  return u;
}

cplx& SpectralField::at(int n) {
  if (n < -max_freq_ || n > max_freq_)
    throw std::out_of_range("SpectralField: frequency " + std::to_string(n) + " outside band " +
                            std::to_string(max_freq_));
  return coeffs_[static_cast<std::size_t>(n + max_freq_)];
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  if (other.max_freq_ > max_freq_) *this = resized(*this, other.max_freq_);
  for (int n = -other.max_freq_; n <= other.max_freq_; ++n) at(n) += other[n];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  if (other.max_freq_ > max_freq_) *this = resized(*this, other.max_freq_);
  for (int n = -other.max_freq_; n <= other.max_freq_; ++n) at(n) -= other[n];
  return *this;
}

SpectralField& SpectralField::operator*=(cplx scale) {
  for (auto& c : coeffs_) c *= scale;
  return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(cplx scale, SpectralField a) { return a *= scale; }

SpectralField resized(const SpectralField& u, int max_freq) {
  SpectralField out(max_freq);
  const int K = std::min(max_freq, u.max_freq());
  for (int n = -K; n <= K; ++n) out.at(n) = u[n];
  return out;
}

double coeff_norm(const SpectralField& u) {
  double acc = 0.0;
  for (const auto& c : u.coeffs()) acc += std::norm(c);
  return std::sqrt(acc);
}

double coeff_distance(const SpectralField& a, const SpectralField& b) {
  const int K = std::max(a.max_freq(), b.max_freq());
  double acc = 0.0;
  for (int n = -K; n <= K; ++n) acc += std::norm(a[n] - b[n]);
  return std::sqrt(acc);
}

SpectralField project_low(const SpectralField& u, int K, bool keep_size) {
  if (K < 0) throw std::invalid_argument("project_low: K must be nonnegative");
  const int band = std::min(K, u.max_freq());
  SpectralField out(keep_size ? u.max_freq() : band);
  for (int n = -band; n <= band; ++n) out.at(n) = u[n];
  return out;
}

SpectralField project_high(const SpectralField& u, int K) {
  if (K < 0) throw std::invalid_argument("project_high: K must be nonnegative");
  SpectralField out = u;
  const int band = std::min(K, u.max_freq());
  for (int n = -band; n <= band; ++n) out.at(n) = cplx{};
  return out;
}

GridField to_grid(const SpectralField& u, int M) {
  if (M < 2 * u.max_freq() + 1)
    throw aliasing_error("to_grid: M = " + std::to_string(M) + " < 2N+1 for N = " +
                         std::to_string(u.max_freq()));
  GridTransform tr(M);
  GridField g;
  g.samples.resize(static_cast<std::size_t>(M));
  tr.synthesize(u, g.samples);
  return g;
}

SpectralField from_grid(const GridField& g, int N) {
  const int M = g.size();
  if (N < 0 || 2 * N + 1 > M)
    throw aliasing_error("from_grid: band N = " + std::to_string(N) + " needs more than " +
                         std::to_string(M) + " grid points");
  GridTransform tr(M);
  SpectralField u(N);
  tr.analyze(g.samples, N, u.coeffs());
  return u;
}

void NormSpec::validate() const {
  if (!(p >= 1.0)) throw std::invalid_argument("NormSpec: p must be >= 1");
  if (!std::isfinite(s)) throw std::invalid_argument("NormSpec: s must be finite");
  if (q && !(*q >= 1.0)) throw std::invalid_argument("NormSpec: q must be >= 1");
  if (b && !std::isfinite(*b)) throw std::invalid_argument("NormSpec: b must be finite");
}

double fl_norm(const SpectralField& u, const NormSpec& spec) {
  spec.validate();
  const int N = u.max_freq();
  if (std::isinf(spec.p)) {
    double m = 0.0;
    for (int n = -N; n <= N; ++n) m = std::max(m, std::pow(bracket(n), spec.s) * std::abs(u[n]));
    return m;
  }
  double acc = 0.0;
  for (int n = -N; n <= N; ++n) {
    const double a = std::abs(u[n]);
    if (a == 0.0) continue;
    acc += std::pow(bracket(n), spec.s * spec.p) * std::pow(a, spec.p);
  }
  return std::pow(acc, 1.0 / spec.p);
}

double sobolev_norm(const SpectralField& u, double s) {
  const int N = u.max_freq();
  double acc = 0.0;
  for (int n = -N; n <= N; ++n) acc += std::pow(bracket(n), 2.0 * s) * std::norm(u[n]);
  return std::sqrt(two_pi * acc);
}

QuadratureValue lp_physical_norm(const SpectralField& u, double p, int M) {
  if (!(p >= 1.0) || std::isinf(p)) throw std::invalid_argument("lp_physical_norm: need finite p >= 1");
  const GridField g = to_grid(u, M);
  const bool even_int = std::floor(p) == p && static_cast<long>(p) % 2 == 0;
  QuadratureValue out;
  out.exact = even_int && M >= static_cast<long>(p) * u.max_freq() + 1;
  double acc = 0.0;
  if (even_int) {
    const long half = static_cast<long>(p) / 2;
    for (const auto& z : g.samples) {
      const double r2 = std::norm(z);
      double v = 1.0;
      for (long k = 0; k < half; ++k) v *= r2;
      acc += v;
    }
  } else {
    for (const auto& z : g.samples) acc += std::pow(std::abs(z), p);
  }
  out.value = std::pow(two_pi / M * acc, 1.0 / p);
  return out;
}

SpectralField derivative(const SpectralField& u, int order) {
  if (order < 1) throw std::invalid_argument("derivative: order must be >= 1");
  SpectralField out = u;
  const int N = u.max_freq();
  for (int n = -N; n <= N; ++n) out.at(n) *= std::pow(cplx(0.0, n), order);
  return out;
}

SpectralField bessel_potential(const SpectralField& u, double s) {
  SpectralField out = u;
  const int N = u.max_freq();
  for (int n = -N; n <= N; ++n) out.at(n) *= std::pow(bracket(n), s);
  return out;
}

void Trajectory::validate() const {
  if (times.empty() || times.size() != states.size())
    throw std::invalid_argument("Trajectory: times and states must be nonempty and of equal length");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw std::invalid_argument("Trajectory: times must increase strictly");
    if (states[i].max_freq() != states[0].max_freq())
      throw std::invalid_argument("Trajectory: states must share one container");
  }
}

namespace {

struct Window {
  std::size_t first = 0;
  std::size_t count = 0;
  double dt = 0.0;
};

Window select_window(const Trajectory& traj, double t0, double t1) {
  traj.validate();
  if (traj.size() < 2) throw std::invalid_argument("xsb_norm: need at least two time samples");
  const double dt = traj.times[1] - traj.times[0];
  for (std::size_t i = 1; i < traj.size(); ++i) {
    const double d = traj.times[i] - traj.times[i - 1];
    if (std::abs(d - dt) > 1e-9 * std::max(1.0, std::abs(dt)))
      throw std::invalid_argument("xsb_norm: time grid is not uniform");
  }
  const double slack = 1e-9 * dt;
  Window w;
  w.dt = dt;
  bool started = false;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (traj.times[i] >= t0 - slack && traj.times[i] <= t1 + slack) {
      if (!started) w.first = i, started = true;
      ++w.count;
    }
  }
  if (w.count < 2) throw std::invalid_argument("xsb_norm: window holds fewer than two samples");
  return w;
}

std::vector<double> hann(std::size_t K) {
  std::vector<double> w(K);
  for (std::size_t k = 0; k < K; ++k)
    w[k] = 0.5 * (1.0 - std::cos(two_pi * static_cast<double>(k) / static_cast<double>(K - 1)));
  return w;
}

std::vector<double> tau_grid(std::size_t K, double dt) {
  std::vector<double> tau(K);
  const long half = static_cast<long>(K / 2);
  for (std::size_t j = 0; j < K; ++j)
    tau[j] = two_pi * static_cast<double>(static_cast<long>(j) - half) / (static_cast<double>(K) * dt);
  return tau;
}

std::vector<cplx> windowed_transform(const Trajectory& traj, const Window& win, int n,
                                     const std::vector<double>& w, const std::vector<double>& tau) {
  std::vector<cplx> out(tau.size());
  for (std::size_t j = 0; j < tau.size(); ++j) {
    cplx acc{};
    for (std::size_t k = 0; k < win.count; ++k) {
      const std::size_t i = win.first + k;
      acc += w[k] * traj.states[i][n] * std::polar(1.0, -tau[j] * traj.times[i]);
    }
    out[j] = acc * win.dt;
  }
  return out;
}

}  // namespace

ModeSpectrum windowed_mode_spectrum(const Trajectory& traj, int n, double t0, double t1) {
  const Window win = select_window(traj, t0, t1);
  const auto w = hann(win.count);
  ModeSpectrum out;
  out.tau = tau_grid(win.count, win.dt);
  const auto f = windowed_transform(traj, win, n, w, out.tau);
  out.magnitude.resize(f.size());
  for (std::size_t j = 0; j < f.size(); ++j) out.magnitude[j] = std::abs(f[j]);
  return out;
}

double xsb_norm(const Trajectory& traj, const NormSpec& spec, double t0, double t1) {
  spec.validate();
  if (!spec.b || !spec.q) throw std::invalid_argument("xsb_norm: NormSpec needs b and q");
  const Window win = select_window(traj, t0, t1);
  const auto w = hann(win.count);
  const auto tau = tau_grid(win.count, win.dt);
  const double dtau = two_pi / (static_cast<double>(win.count) * win.dt);
  const double b = *spec.b, q = *spec.q;
  const int N = traj.states.front().max_freq();

  std::vector<double> per_mode;
  per_mode.reserve(static_cast<std::size_t>(2 * N + 1));
  for (int n = -N; n <= N; ++n) {
    const auto f = windowed_transform(traj, win, n, w, tau);
    const double n3 = static_cast<double>(n) * n * n;
    double acc = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) {
      const double v = std::pow(bracket(tau[j] - n3), b) * std::abs(f[j]);
      acc = std::isinf(q) ? std::max(acc, v) : acc + std::pow(v, q) * dtau;
    }
    const double lq = std::isinf(q) ? acc : std::pow(acc, 1.0 / q);
    per_mode.push_back(std::pow(bracket(n), spec.s) * lq);
  }
  if (std::isinf(spec.p)) return *std::max_element(per_mode.begin(), per_mode.end());
  double acc = 0.0;
  for (double v : per_mode) acc += std::pow(v, spec.p);
  return std::pow(acc, 1.0 / spec.p);
}

}  // namespace mkdvlab
