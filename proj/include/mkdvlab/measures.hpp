#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mkdvlab/sign.hpp"
#include "mkdvlab/spectral_field.hpp"
#include "mkdvlab/stats.hpp"

namespace mkdvlab {

/// Gaussian ensemble c_j = g_j / (sqrt(2 pi) <j>), |j| <= N, with the weighted measure's
/// cutoff radius R and sign.
struct EnsembleSpec {
  int N = 8;
  std::uint64_t seed = 1;
  std::size_t count = 1000;
  Sign sign = Sign::defocusing;
  double R = 4.0;
  int band = -1;  // populate only |j| <= band (container stays N); -1 means N

  void validate() const;
};

/// g_j of sample `index` for frequency j. Keyed by frequency, so ensembles that differ only
/// in N share their common modes.
cplx ensemble_gaussian(std::uint64_t seed, std::size_t index, int j);

SpectralField sample_field(const EnsembleSpec& spec, std::size_t index);

/// chi(x / R): 1 on |t| <= 1, 0 on |t| >= 2, smooth transition h(2-|t|) / (h(2-|t|) + h(|t|-1))
/// with h(s) = exp(-1/s).
double bump_chi(double x, double R);

struct SampleWeight {
  double e1 = 0.0;
  double l4_fourth = 0.0;
  double chi = 0.0;
  double weight = 0.0;  // chi * exp(-+ l4_fourth)
};

/// chi_R(E_1(u)) exp(-+ int |u|^4).
SampleWeight density_weight(const SpectralField& u, double R, Sign sign);

/// Monte Carlo P(norm(u) > lambda) with binomial error. A NormSpec with p = 2 and s = 0 is the
/// L^2 norm (2 pi scaled); any other spec is the FL^{s,p} norm.
Estimate tail_probability(const EnsembleSpec& spec, const NormSpec& norm, double lambda, int workers = 1);

struct MomentEstimate {
  Estimate moment;
  double max_share = 0.0;  // largest single-sample share of sum w^q
};

/// E_mu[F^q] with F the density weight.
MomentEstimate density_moment(const EnsembleSpec& spec, double q, int workers = 1);

/// sum w_i f(u_i) / sum w_i over the ensemble.
Estimate weighted_expectation(const EnsembleSpec& spec, const std::function<double(const SpectralField&)>& functional,
                              int workers = 1);

struct GagliardoNirenberg {
  double lhs = 0.0;  // ||u||_{L^4}
  double rhs = 0.0;  // ||<D>^{1/4} u||_{L^8}^{2/5} ||u||_{L^2}^{3/5}
};
GagliardoNirenberg gagliardo_nirenberg(const SpectralField& u);

/// (E|sum_j a_j g_j|^r)^{1/r} for each r, estimated from `count` draws.
std::vector<double> empirical_lr_norms(const std::vector<cplx>& a, const std::vector<double>& r, std::uint64_t seed,
                                       std::size_t count);

std::string estimator_csv_header();
std::string estimator_csv_row(const std::string& experiment, int N, double R, Sign sign, double q_or_lambda,
                              const Estimate& e, std::uint64_t seed);

}  // namespace mkdvlab
