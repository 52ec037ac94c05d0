#include "mkdvlab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mkdvlab/energies.hpp"
#include "mkdvlab/fft.hpp"

namespace mkdvlab {

std::string to_string(Equation e) { return e == Equation::mkdv ? "mkdv" : "mkdv2"; }

Equation parse_equation(const std::string& text) {
  if (text == "mkdv") return Equation::mkdv;
  if (text == "mkdv2") return Equation::mkdv2;
  throw std::invalid_argument("unknown equation '" + text + "'");
}

void FlowConfig::validate() const {
  if (N < 1) throw std::invalid_argument("FlowConfig: N must be >= 1");
  if (!(tol > 0.0)) throw std::invalid_argument("FlowConfig: tol must be positive");
  if (!(dt > 0.0)) throw std::invalid_argument("FlowConfig: dt must be positive");
  if (!std::isfinite(t_final)) throw std::invalid_argument("FlowConfig: t_final must be finite");
}

// ---------------------------------------------------------------------------------------------

std::int64_t resonance(std::int64_t n1, std::int64_t n2, std::int64_t n3) {
  std::int64_t a = 0, b = 0, c = 0, ab = 0, abc = 0, out = 0;
  if (__builtin_add_overflow(n1, n2, &a) || __builtin_add_overflow(n1, n3, &b) ||
      __builtin_add_overflow(n2, n3, &c) || __builtin_mul_overflow(a, b, &ab) ||
      __builtin_mul_overflow(ab, c, &abc) || __builtin_mul_overflow(abc, std::int64_t{3}, &out))
    throw std::overflow_error("resonance: integer overflow");
  return out;
}

std::string to_string(Region r) {
  switch (r) {
    case Region::A: return "A";
    case Region::B: return "B";
    case Region::C: return "C";
    case Region::D: return "D";
    case Region::resonant: return "resonant";
  }
  return "?";
}

namespace {

// |a| << |b|
bool much_less(std::int64_t a, std::int64_t b) { return 4 * std::abs(a) <= std::abs(b); }
// |a| <~ |b|
bool less_sim(std::int64_t a, std::int64_t b) { return std::abs(a) <= 4 * std::abs(b); }
// |a| ~ |b|
bool comparable(std::int64_t a, std::int64_t b) {
  return std::abs(a) < 4 * std::abs(b) && std::abs(b) <= 4 * std::abs(a);
}

}  // namespace

bool region_predicate(Region r, std::int64_t n1, std::int64_t n2, std::int64_t n3) {
  const std::int64_t n = n1 + n2 + n3;
  if (r == Region::resonant) return resonance(n1, n2, n3) == 0;
  switch (r) {
    case Region::A: return much_less(n2, n1);
    case Region::B: {
      const std::int64_t lo = std::min(std::abs(n), std::abs(n1));
      const std::int64_t hi = std::max(std::abs(n), std::abs(n1));
      return less_sim(n3, lo) && comparable(hi, n2);
    }
    case Region::C: return less_sim(n, n3) && much_less(n3, n1);
    case Region::D: return less_sim(n1, n3);
    default: return false;
  }
}

Region classify_region(std::int64_t n1, std::int64_t n2, std::int64_t n3) {
  if (resonance(n1, n2, n3) == 0) return Region::resonant;
  for (Region r : {Region::D, Region::A, Region::C})
    if (region_predicate(r, n1, n2, n3)) return r;
  return Region::B;
}

FrequencyTriple FrequencyTriple::make(std::int64_t n1, std::int64_t n2, std::int64_t n3) {
  return {n1, n2, n3, resonance(n1, n2, n3), classify_region(n1, n2, n3)};
}

// ---------------------------------------------------------------------------------------------

int nonlinearity_grid_size(int N) { return next_fast_size(4 * N + 1); }

namespace {

// Evaluates the Galerkin right-hand side on a fixed grid; one instance per thread. With
// track_drift the grid resolves sextic integrands and each evaluation also returns e3_drift.
class Rhs {
 public:
  Rhs(const FlowConfig& cfg, int M, bool track_drift = false)
      : N_(cfg.N),
        scale_(6.0 * sign_value(cfg.sign)),
        renormalized_(cfg.equation == Equation::mkdv2),
        nonlinear_(cfg.nonlinear),
        track_(track_drift),
        tr_(M),
        u_(static_cast<std::size_t>(M)),
        ux_(static_cast<std::size_t>(M)),
        dcoef_(static_cast<std::size_t>(2 * cfg.N + 1)) {
    if (M < 4 * N_ + 1)
      throw aliasing_error("nonlinearity: cubic projection onto |n| <= N needs M >= 4N+1, got " +
                           std::to_string(M));
    if (track_) {
      if (M < 6 * N_ + 1) throw aliasing_error("drift tracking needs M >= 6N+1, got " + std::to_string(M));
      cubic_.resize(static_cast<std::size_t>(6 * N_ + 1));
      mass_cubic_.resize(cubic_.size());
    }
  }

  int N() const { return N_; }
  bool tracks_drift() const { return track_; }

  // out = scale * Pi_N(|u|^2 u_x [- M u_x - i P u]) for the 2N+1 Galerkin coefficients c.
  void operator()(std::span<const cplx> c, std::span<cplx> out, double* drift = nullptr) {
    ++evaluations;
    if (!nonlinear_ && !track_) {
      std::fill(out.begin(), out.end(), cplx{});
      return;
    }
    double m = 0.0, p = 0.0;
    for (int n = -N_; n <= N_; ++n) {
      const auto k = static_cast<std::size_t>(n + N_);
      dcoef_[k] = cplx(0.0, n) * c[k];
      const double a = std::norm(c[k]);
      m += a;
      p += n * a;
    }
    tr_.synthesize(c, N_, u_);
    tr_.synthesize(dcoef_, N_, ux_);
    if (track_) {
      // Pi_{>N}(|v|^2 v_x) against v|v|^2: drift = -24 * 2 pi Re sum_{|n|>N} q_n conj(g_n).
      for (std::size_t i = 0; i < u_.size(); ++i) {
        const double rho = std::norm(u_[i]);
        ux_[i] *= rho;
        u_[i] *= rho;
      }
      tr_.analyze(ux_, 3 * N_, cubic_);
      tr_.analyze(u_, 3 * N_, mass_cubic_);
      double acc = 0.0;
      for (std::size_t k = 0; k < cubic_.size(); ++k) {
        const int n = static_cast<int>(k) - 3 * N_;
        if (std::abs(n) > N_) acc += (cubic_[k] * std::conj(mass_cubic_[k])).real();
      }
      if (drift) *drift = -24.0 * two_pi * acc;
      for (int n = -N_; n <= N_; ++n)
        out[static_cast<std::size_t>(n + N_)] = nonlinear_ ? cubic_[static_cast<std::size_t>(n + 3 * N_)] : cplx{};
      if (!nonlinear_) return;
    } else {
      for (std::size_t i = 0; i < u_.size(); ++i) u_[i] = std::norm(u_[i]) * ux_[i];
      tr_.analyze(u_, N_, out);
    }
    for (int n = -N_; n <= N_; ++n) {
      const auto k = static_cast<std::size_t>(n + N_);
      if (renormalized_) out[k] -= m * dcoef_[k] + cplx(0.0, p) * c[k];
      out[k] *= scale_;
    }
  }

  long evaluations = 0;

 private:
  int N_;
  double scale_;
  bool renormalized_;
  bool nonlinear_;
  bool track_;
  GridTransform tr_;
  std::vector<cplx> u_, ux_, dcoef_, cubic_, mass_cubic_;
};

std::vector<cplx> galerkin_coeffs(const SpectralField& u, int N) {
  std::vector<cplx> c(static_cast<std::size_t>(2 * N + 1));
  for (int n = -N; n <= N; ++n) c[static_cast<std::size_t>(n + N)] = u[n];
  return c;
}

// Lawson (integrating-factor) RK4 for c' = i n^3 c + F(c). With drift tracking, the scalar
// y' = e3_drift(c) rides along on the same stages.
class Stepper {
 public:
  explicit Stepper(const FlowConfig& cfg, bool track_drift = false)
      : rhs_(cfg, track_drift ? energy_grid_size(cfg.N) : nonlinearity_grid_size(cfg.N), track_drift),
        dim_(static_cast<std::size_t>(2 * cfg.N + 1)) {
    for (auto* v : {&k1_, &k2_, &k3_, &k4_, &tmp_, &f0_, &half_, &big_, &p4_, &p2_, &p1_}) v->resize(dim_);
  }

  Rhs& rhs() { return rhs_; }

  void set_phases(double h) {
    if (h == phase_step_) return;
    phase_step_ = h;
    const int N = rhs_.N();
    for (int n = -N; n <= N; ++n) {
      const auto k = static_cast<std::size_t>(n + N);
      p4_[k] = std::polar(1.0, static_cast<double>(n) * n * n * h * 0.25);
      p2_[k] = p4_[k] * p4_[k];
      p1_[k] = p2_[k] * p2_[k];
    }
  }

  // One step of size h using phases e^{i n^3 h/2} (half) and e^{i n^3 h} (full). f0 must hold
  // F(c) (and d0 its drift) when have_f0 is set. Returns the increment of the drift integral.
  double rk4(std::span<const cplx> c, double h, const std::vector<cplx>& half, const std::vector<cplx>& full,
             std::span<cplx> out, bool have_f0) {
    double d1 = 0.0, d2 = 0.0, d3 = 0.0, d4 = 0.0;
    if (!have_f0) rhs_(c, f0_, &d0_);
    d1 = d0_;
    for (std::size_t k = 0; k < dim_; ++k) k1_[k] = h * f0_[k];
    for (std::size_t k = 0; k < dim_; ++k) tmp_[k] = half[k] * (c[k] + 0.5 * k1_[k]);
    rhs_(tmp_, k2_, &d2);
    for (std::size_t k = 0; k < dim_; ++k) k2_[k] *= h;
    for (std::size_t k = 0; k < dim_; ++k) tmp_[k] = half[k] * c[k] + 0.5 * k2_[k];
    rhs_(tmp_, k3_, &d3);
    for (std::size_t k = 0; k < dim_; ++k) k3_[k] *= h;
    for (std::size_t k = 0; k < dim_; ++k) tmp_[k] = full[k] * c[k] + half[k] * k3_[k];
    rhs_(tmp_, k4_, &d4);
    for (std::size_t k = 0; k < dim_; ++k) {
      k4_[k] *= h;
      out[k] = full[k] * c[k] + (full[k] * k1_[k] + 2.0 * half[k] * (k2_[k] + k3_[k]) + k4_[k]) / 6.0;
    }
    return h * (d1 + 2.0 * d2 + 2.0 * d3 + d4) / 6.0;
  }

  double single(std::span<const cplx> c, double h, std::span<cplx> out) {
    set_phases(h);
    return rk4(c, h, p2_, p1_, out, false);
  }

  // Step doubling with local extrapolation. Returns the error estimate of the two-half-step
  // result; dy receives the extrapolated drift increment.
  double doubled(std::span<const cplx> c, double h, std::span<cplx> out, double& dy) {
    set_phases(h);
    rhs_(c, f0_, &d0_);
    const double y_big = rk4(c, h, p2_, p1_, big_, true);
    double y_half = rk4(c, 0.5 * h, p4_, p2_, half_, true);
    y_half += rk4(half_, 0.5 * h, p4_, p2_, out, false);
    dy = y_half + (y_half - y_big) / 15.0;
    double diff = 0.0, norm = 0.0;
    for (std::size_t k = 0; k < dim_; ++k) {
      diff += std::norm(out[k] - big_[k]);
      norm += std::norm(out[k]);
    }
    for (std::size_t k = 0; k < dim_; ++k) out[k] += (out[k] - big_[k]) / 15.0;
    if (norm == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::sqrt(diff / norm) / 15.0;
  }

 private:
  Rhs rhs_;
  std::size_t dim_;
  double d0_ = 0.0;
  double phase_step_ = std::numeric_limits<double>::quiet_NaN();
  std::vector<cplx> k1_, k2_, k3_, k4_, tmp_, f0_, half_, big_, p4_, p2_, p1_;
};

// Advances the Galerkin coefficients from t to t_end adaptively; h carries the step between calls.
void integrate(Stepper& st, std::vector<cplx>& c, double t, double t_end, double& h, const FlowConfig& cfg,
               FlowStats& stats, double* drift_integral = nullptr) {
  std::vector<cplx> trial(c.size());
  const double dir = t_end >= t ? 1.0 : -1.0;
  h = dir * std::abs(h);
  while (dir * (t_end - t) > 0.0) {
    const double remaining = t_end - t;
    const bool clipped = std::abs(h) >= std::abs(remaining);
    const double h_try = clipped ? remaining : h;
    double dy = 0.0;
    const double err = st.doubled(c, h_try, trial, dy);
    double factor = err == 0.0 ? 4.0 : 0.9 * std::pow(cfg.tol / err, 0.2);
    factor = std::clamp(factor, 0.2, 4.0);
    if (err <= cfg.tol) {
      c.swap(trial);
      if (drift_integral) *drift_integral += dy;
      t = clipped ? t_end : t + h_try;
      ++stats.accepted;
      const double a = std::abs(h_try);
      stats.smallest_step = stats.smallest_step == 0.0 ? a : std::min(stats.smallest_step, a);
      if (!clipped || factor < 1.0) h = h_try * factor;
    } else {
      ++stats.rejected;
      h = h_try * factor;
    }
    if (std::abs(h) < 1e-12)
      throw integration_error("step size underflow at t = " + std::to_string(t) + " (error estimate " +
                              std::to_string(err) + ")");
  }
}

SpectralField assemble(const SpectralField& u0, const std::vector<cplx>& c, int N, double t) {
  SpectralField out(u0.max_freq());
  const int K = u0.max_freq();
  for (int n = -K; n <= K; ++n) {
    if (std::abs(n) <= N) {
      out.at(n) = c[static_cast<std::size_t>(n + N)];
    } else {
      const double n3 = static_cast<double>(n) * n * n;
      out.at(n) = u0[n] * std::polar(1.0, std::fmod(n3 * t, two_pi));
    }
  }
  return out;
}

}  // namespace

SpectralField nonlinearity(const SpectralField& u, const FlowConfig& cfg) {
  return nonlinearity(u, cfg, nonlinearity_grid_size(cfg.N));
}

SpectralField nonlinearity(const SpectralField& u, const FlowConfig& cfg, int M) {
  cfg.validate();
  Rhs rhs(cfg, M);
  const auto c = galerkin_coeffs(u, cfg.N);
  SpectralField out(cfg.N);
  rhs(c, out.coeffs());
  return out;
}

NonlinearityParts nonlinearity_direct(const SpectralField& u, const FlowConfig& cfg, int cap) {
  cfg.validate();
  const int N = cfg.N;
  if (N > cap) throw std::invalid_argument("nonlinearity_direct: N exceeds enumeration cap " + std::to_string(cap));
  NonlinearityParts parts{SpectralField(N), SpectralField(N), SpectralField(N), SpectralField(N)};
  const auto uhat = [&](int n) { return std::abs(n) <= N ? u[n] : cplx{}; };
  for (int n1 = -N; n1 <= N; ++n1) {
    for (int n2 = -N; n2 <= N; ++n2) {
      const cplx left = cplx(0.0, n1) * uhat(n1) * std::conj(uhat(-n2));
      if (left == cplx{}) continue;
      for (int n3 = -N; n3 <= N; ++n3) {
        const int n = n1 + n2 + n3;
        if (std::abs(n) > N) continue;
        if (resonance(n1, n2, n3) == 0) continue;
        const cplx term = left * uhat(n3);
        if (std::abs(n2) >= std::abs(n3)) parts.nr_ge.at(n) += term;
        if (std::abs(n2) <= std::abs(n3)) parts.nr_le.at(n) += term;
        if (std::abs(n2) == std::abs(n3)) parts.diagonal.at(n) += term;
      }
    }
  }
  for (int n = -N; n <= N; ++n) parts.resonant.at(n) = cplx(0.0, -n) * std::norm(uhat(n)) * uhat(n);
  return parts;
}

// ---------------------------------------------------------------------------------------------

SpectralField step(const SpectralField& u, double dt, const FlowConfig& cfg) {
  cfg.validate();
  Stepper st(cfg);
  auto c = galerkin_coeffs(u, cfg.N);
  std::vector<cplx> out(c.size());
  st.single(c, dt, out);
  return assemble(u, out, cfg.N, dt);
}

SpectralField evolve(const SpectralField& u0, double t, const FlowConfig& cfg, FlowStats* stats) {
  cfg.validate();
  Stepper st(cfg);
  auto c = galerkin_coeffs(u0, cfg.N);
  FlowStats local;
  double h = cfg.dt;
  integrate(st, c, 0.0, t, h, cfg, local);
  local.rhs_evaluations = st.rhs().evaluations;
  if (stats) *stats = local;
  return assemble(u0, c, cfg.N, t);
}

DriftIntegral evolve_with_drift(const SpectralField& u0, double t, const FlowConfig& cfg, FlowStats* stats) {
  cfg.validate();
  Stepper st(cfg, true);
  auto c = galerkin_coeffs(u0, cfg.N);
  FlowStats local;
  double h = cfg.dt, y = 0.0;
  integrate(st, c, 0.0, t, h, cfg, local, &y);
  local.rhs_evaluations = st.rhs().evaluations;
  if (stats) *stats = local;
  return {assemble(u0, c, cfg.N, t), y};
}

Trajectory flow(const SpectralField& u0, const FlowConfig& cfg, std::vector<double> output_times,
                FlowStats* stats) {
  cfg.validate();
  if (output_times.empty()) output_times = {0.0, cfg.t_final};
  for (std::size_t i = 0; i < output_times.size(); ++i) {
    if (output_times[i] < 0.0) throw std::invalid_argument("flow: output times must be nonnegative");
    if (i > 0 && !(output_times[i] > output_times[i - 1]))
      throw std::invalid_argument("flow: output times must increase strictly");
  }
  Stepper st(cfg);
  auto c = galerkin_coeffs(u0, cfg.N);
  FlowStats local;
  double h = cfg.dt, t = 0.0;
  Trajectory traj;
  for (double target : output_times) {
    integrate(st, c, t, target, h, cfg, local);
    t = target;
    traj.times.push_back(target);
    traj.states.push_back(assemble(u0, c, cfg.N, target));
  }
  local.rhs_evaluations = st.rhs().evaluations;
  if (stats) *stats = local;
  return traj;
}

std::vector<double> uniform_times(double t_final, int intervals) {
  if (intervals < 1) throw std::invalid_argument("uniform_times: need at least one interval");
  std::vector<double> t(static_cast<std::size_t>(intervals + 1));
  for (int k = 0; k <= intervals; ++k) t[static_cast<std::size_t>(k)] = t_final * k / intervals;
  return t;
}

// ---------------------------------------------------------------------------------------------

GaugeConstants gauge_constants(double mass_value, double momentum_value, Sign sign) {
  const double s = sign_value(sign);
  return {-6.0 * s * momentum_value, 6.0 * s * mass_value};
}

Trajectory gauge_transform(const Trajectory& mkdv, Sign sign) {
  mkdv.validate();
  const double m0 = mass(mkdv.states.front());
  const double p0 = momentum(mkdv.states.front());
  for (const auto& s : mkdv.states) {
    if (std::abs(mass(s) - m0) > 1e-9 * std::max(1.0, std::abs(m0)) ||
        std::abs(momentum(s) - p0) > 1e-9 * std::max(1.0, std::abs(p0)))
      throw std::invalid_argument("gauge_transform: mass or momentum not conserved along input");
  }
  const GaugeConstants g = gauge_constants(m0, p0, sign);
  Trajectory out = mkdv;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double t = out.times[i];
    auto& s = out.states[i];
    const int K = s.max_freq();
    for (int n = -K; n <= K; ++n) s.at(n) *= std::polar(1.0, (g.phase_rate - n * g.speed) * t);
  }
  return out;
}

std::vector<double> stencil_times(const std::vector<double>& centers, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("stencil_times: delta must be positive");
  std::vector<double> t;
  for (double c : centers) {
    if (c - 2.0 * delta < 0.0) throw std::invalid_argument("stencil_times: stencil reaches below t = 0");
    for (int k = -2; k <= 2; ++k) t.push_back(c + k * delta);
  }
  return t;
}

double mkdv2_residual(const Trajectory& v, const FlowConfig& cfg) {
  v.validate();
  if (v.size() == 0 || v.size() % 5 != 0)
    throw std::invalid_argument("mkdv2_residual: expects groups of five stencil samples");
  FlowConfig c2 = cfg;
  c2.equation = Equation::mkdv2;
  const int N = cfg.N;
  double worst = 0.0;
  for (std::size_t g = 0; g < v.size(); g += 5) {
    const double t0 = v.times[g + 2];
    const double h = v.times[g + 3] - t0;
    for (std::size_t k = 0; k < 5; ++k) {
      const double expect = t0 + (static_cast<double>(k) - 2.0) * h;
      if (std::abs(v.times[g + k] - expect) > 1e-12 * std::max(1.0, std::abs(t0)))
        throw std::invalid_argument("mkdv2_residual: stencil samples are not equally spaced");
    }
    const SpectralField nl = nonlinearity(v.states[g + 2], c2);
    double acc = 0.0;
    for (int n = -N; n <= N; ++n) {
      const double n3 = static_cast<double>(n) * n * n;
      // Interaction picture w = e^{-i n^3 t} v removes the linear phase before differencing.
      const auto w = [&](std::size_t k) { return v.states[g + k][n] * std::polar(1.0, -n3 * (v.times[g + k] - t0)); };
      const cplx dwdt = (-w(4) + 8.0 * w(3) - 8.0 * w(1) + w(0)) / (12.0 * h);
      acc += std::norm(dwdt - nl[n]);
    }
    worst = std::max(worst, std::sqrt(acc));
  }
  return worst;
}

}  // namespace mkdvlab
