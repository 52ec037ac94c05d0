#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mkdvlab/sign.hpp"
#include "mkdvlab/spectral_field.hpp"

namespace mkdvlab {

enum class Equation { mkdv, mkdv2 };

std::string to_string(Equation e);
Equation parse_equation(const std::string& text);

/// Truncated flow parameters. The Galerkin system evolves |n| <= N; modes above N ride the
/// free flow c_n e^{i n^3 t}.
struct FlowConfig {
  int N = 8;
  Sign sign = Sign::defocusing;
  Equation equation = Equation::mkdv2;
  double dt = 1e-3;    // initial step
  double tol = 1e-9;   // relative step-doubling tolerance per step
  double t_final = 1.0;
  bool nonlinear = true;  // false integrates the free (Airy) flow only

  void validate() const;
};

struct integration_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------------------------
// Resonance structure of the cubic term.

/// n^3 - n1^3 - n2^3 - n3^3 with n = n1 + n2 + n3, evaluated in factored form
/// 3 (n1+n2)(n1+n3)(n2+n3). Throws std::overflow_error if the product does not fit.
std::int64_t resonance(std::int64_t n1, std::int64_t n2, std::int64_t n3);

enum class Region { A, B, C, D, resonant };
std::string to_string(Region r);

/// Frequency regions with "<<" meaning |a| <= |b|/4, "~" meaning |a|/4 < |b| <= 4|a| and
/// "<~" meaning |a| <= 4|b|. Precedence D, A, C; every remaining non-resonant triple is B.
Region classify_region(std::int64_t n1, std::int64_t n2, std::int64_t n3);
/// The literal region predicate, without precedence or fallback.
bool region_predicate(Region r, std::int64_t n1, std::int64_t n2, std::int64_t n3);

struct FrequencyTriple {
  std::int64_t n1 = 0, n2 = 0, n3 = 0;
  std::int64_t phi = 0;
  Region region = Region::resonant;

  static FrequencyTriple make(std::int64_t n1, std::int64_t n2, std::int64_t n3);
};

// ---------------------------------------------------------------------------------------------
// Right-hand side.

/// Grid for the dealiased cubic: exact projection of a degree-3 product onto |n| <= N.
int nonlinearity_grid_size(int N);

/// +-6 Pi_N(|v|^2 v_x - M(v) v_x - i P(v) v) with v = Pi_N u (mkdv2), or +-6 Pi_N(|v|^2 v_x)
/// (mkdv). Result has band N. Rejects grids below 4N + 1.
SpectralField nonlinearity(const SpectralField& u, const FlowConfig& cfg);
SpectralField nonlinearity(const SpectralField& u, const FlowConfig& cfg, int M);

/// Explicit triple sums over n = n1 + n2 + n3 with conj(u)^(n2) = conj(u_{-n2}):
///   nr_ge:    Phi != 0, |n2| >= |n3|
///   nr_le:    Phi != 0, |n2| <= |n3|
///   diagonal: Phi != 0, |n2| == |n3|   (counted in both nr_ge and nr_le)
///   resonant: -i n |u_n|^2 u_n
/// of i n1 u(n1) conj(u)^(n2) u(n3). nr_ge + nr_le - diagonal + resonant equals
/// Pi_N(|v|^2 v_x - M v_x - i P v).
struct NonlinearityParts {
  SpectralField nr_ge, nr_le, diagonal, resonant;
};
NonlinearityParts nonlinearity_direct(const SpectralField& u, const FlowConfig& cfg, int cap = 64);

// ---------------------------------------------------------------------------------------------
// Integration.

struct FlowStats {
  long accepted = 0;
  long rejected = 0;
  long rhs_evaluations = 0;
  double smallest_step = 0.0;
};

/// One integrating-factor RK4 step of size dt (either sign) for the Galerkin modes of u.
/// The result has the container of u; modes above N advance by the exact free phase.
SpectralField step(const SpectralField& u, double dt, const FlowConfig& cfg);

/// Adaptive evolution to time t (either sign).
SpectralField evolve(const SpectralField& u0, double t, const FlowConfig& cfg, FlowStats* stats = nullptr);

struct DriftIntegral {
  SpectralField state;
  double e3_change = 0.0;
};

/// Adaptive evolution to time t that also integrates e3_drift on the same Runge-Kutta stages.
/// e3_change approximates E_3(Pi_N u(t)) - E_3(Pi_N u0) without differencing two large energies.
DriftIntegral evolve_with_drift(const SpectralField& u0, double t, const FlowConfig& cfg, FlowStats* stats = nullptr);

/// Flow from t = 0, recording states at the requested increasing output times
/// (default {0, cfg.t_final}). Times must be >= 0.
Trajectory flow(const SpectralField& u0, const FlowConfig& cfg, std::vector<double> output_times = {},
                FlowStats* stats = nullptr);

/// Uniform output grid 0, T/k, ..., T.
std::vector<double> uniform_times(double t_final, int intervals);

// ---------------------------------------------------------------------------------------------
// Gauge equivalence between the truncated mKdV and mKdV2 flows.

/// v(t, x) = e^{i phase_rate t} u(t, x - speed t); coefficient n picks up
/// e^{i (phase_rate - n speed) t}.
struct GaugeConstants {
  double phase_rate = 0.0;
  double speed = 0.0;
};

/// phase_rate = -+6 P, speed = +-6 M. Matching the single-mode solutions of both equations
/// under the +-6 normalization fixes these factors.
GaugeConstants gauge_constants(double mass, double momentum, Sign sign);

/// Maps an mKdV trajectory to the mKdV2 trajectory with the same data. Rejects input whose
/// mass or momentum drifts by more than 1e-9 (relative).
Trajectory gauge_transform(const Trajectory& mkdv, Sign sign);

/// Five equally spaced times c - 2 delta, ..., c + 2 delta around each center.
std::vector<double> stencil_times(const std::vector<double>& centers, double delta);

/// l2 norm of dv/dt - (linear + mkdv2 nonlinearity)(v) at the middle of each consecutive group
/// of five equally spaced samples (see stencil_times). dv/dt is a fourth-order difference in the
/// interaction picture. Returns the maximum over groups.
double mkdv2_residual(const Trajectory& v, const FlowConfig& cfg);

}  // namespace mkdvlab
