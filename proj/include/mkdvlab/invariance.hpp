#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mkdvlab/dynamics.hpp"
#include "mkdvlab/result.hpp"
#include "mkdvlab/sign.hpp"
#include "mkdvlab/stats.hpp"

namespace mkdvlab {

/// Measurable sets with cheap membership tests.
struct TestSet {
  enum class Kind { whole, e1_ball, fl_ball, half_space };
  Kind kind = Kind::whole;
  double r = 0.0;             // radius or threshold
  double s = 0.5, p = 4.0;    // fl_ball indices
  int n0 = 0;                 // half_space frequency: Re c_{n0} <= r

  static TestSet whole() { return {}; }
  static TestSet e1_ball(double r) { return {Kind::e1_ball, r}; }
  static TestSet fl_ball(double r, double s, double p) { return {Kind::fl_ball, r, s, p}; }
  static TestSet half_space(int n0, double r) { return {Kind::half_space, r, 0.5, 4.0, n0}; }

  bool contains(const SpectralField& u) const;
  std::string name() const;
};

struct InvarianceSpec {
  int N = 8;
  double R = 4.0;
  Sign sign = Sign::defocusing;
  double t = 0.5;
  std::size_t samples = 1000;
  std::uint64_t seed = 1;
  double tol = 1e-5;
  double dt = 1e-3;
  std::vector<TestSet> sets{TestSet::whole()};
};

struct DeltaEstimate {
  TestSet set;
  Estimate delta;
};

struct InvarianceResult {
  std::vector<DeltaEstimate> deltas;
  std::vector<SampleFailure> excluded;  // samples whose integration failed
  std::size_t samples = 0;
  double exclusion_rate() const;
  bool exclusion_ok() const { return exclusion_rate() <= 1e-3; }
};

/// rho(Phi_N(t) A) - rho(A) for each set A as the self-normalized average of
/// 1_A(v) (e^{-dE3(v,t)} - 1) under weights chi_R(E_1(v)) e^{-+ int |v|^4}, v ~ mu_N.
/// dE3 = E_3(Phi_N(t) v) - E_3(v), integrated from e3_drift along the flow. One flow per
/// sample serves every set.
InvarianceResult invariance_delta(const InvarianceSpec& spec, int workers = 1);

struct ConservationSpec {
  int N = 16;
  Sign sign = Sign::defocusing;
  double t_final = 0.5;
  std::size_t samples = 4;
  std::uint64_t seed = 1;
  double tol = 1e-9;
  int intervals = 50000;    // trapezoid grid for the time integral of the E_3 drift
  bool single_mode = false; // sample c e^{imx} data instead of Gaussian fields
  double e3_tolerance = 1e-6;  // relative E_3 change vs drift integral mismatch
};

/// Per sample: relative E_1 drift, E_2 and momentum drift, E_3 change against the trapezoid
/// integral of e3_drift along the trajectory. The mismatch is relative once the E_3 change exceeds
/// 1e-9 and absolute below that.
ExperimentResult conservation_suite(const ConservationSpec& spec, int workers = 1);

struct NormGrowthSpec {
  std::vector<double> S_grid{0.5, 1.0, 2.0, 4.0};
  std::vector<int> N_grid{16, 32, 64};
  double s = 0.5;
  double p = 4.0;
  std::size_t samples = 4;
  std::uint64_t seed = 1;
  double t_max = 0.1;
  int intervals = 50;
  double tol = 1e-8;
  Sign sign = Sign::defocusing;
  bool nonlinear = true;
};

/// Scaled Gaussian data with FL^{s,p} norm S: running max over the window of the norm divided
/// by S + 1/S, and the largest grid time at which that ratio is still <= 1.
ExperimentResult norm_growth_study(const NormGrowthSpec& spec, int workers = 1);

struct ConvergenceSpec {
  std::vector<int> N_grid{8, 16, 32, 64};
  double s = 0.9;        // data regularity
  double s_prime = 0.5;  // measuring norm
  double p = 4.0;
  double T = 0.2;
  int intervals = 20;
  double amplitude = 1.0;
  std::uint64_t seed = 1;
  double tol = 1e-9;
  Sign sign = Sign::defocusing;
};

/// c_n = amplitude <n>^{-(s + 1/p + 0.05)} e^{i theta_n}, |n| <= 2 max(N_grid).
SpectralField convergence_data(const ConvergenceSpec& spec);

/// sup over the time grid of ||Phi_N(t) u0 - Phi_{2N}(t) u0||_{FL^{s',p}} per N, and the
/// fitted exponent of N^{-exponent}.
ExperimentResult convergence_study(const ConvergenceSpec& spec, int workers = 1);

}  // namespace mkdvlab
