#include "mkdvlab/measures.hpp"

#include <cmath>
#include <sstream>

#include "mkdvlab/energies.hpp"
#include "mkdvlab/ensemble.hpp"
#include "mkdvlab/rng.hpp"

namespace mkdvlab {

void EnsembleSpec::validate() const {
  if (N < 0) throw std::invalid_argument("EnsembleSpec: N must be nonnegative");
  if (count < 1) throw std::invalid_argument("EnsembleSpec: count must be >= 1");
  if (!(R > 0.0)) throw std::invalid_argument("EnsembleSpec: R must be positive");
  if (band < -1) throw std::invalid_argument("EnsembleSpec: band must be -1 or nonnegative");
}

cplx ensemble_gaussian(std::uint64_t seed, std::size_t index, int j) {
  return CounterRng(seed).complex_normal(index, static_cast<std::uint32_t>(j));
}

SpectralField sample_field(const EnsembleSpec& spec, std::size_t index) {
  spec.validate();
  const int band = spec.band < 0 ? spec.N : std::min(spec.band, spec.N);
  const CounterRng rng(spec.seed);
  SpectralField u(spec.N);
  const double norm = 1.0 / std::sqrt(two_pi);
  for (int j = -band; j <= band; ++j)
    u.at(j) = norm / bracket(j) * rng.complex_normal(index, static_cast<std::uint32_t>(j));
  return u;
}

double bump_chi(double x, double R) {
  if (!(R > 0.0)) throw std::invalid_argument("bump_chi: R must be positive");
  const double t = std::abs(x / R);
  if (t <= 1.0) return 1.0;
  if (t >= 2.0) return 0.0;
  const auto h = [](double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; };
  const double a = h(2.0 - t);
  return a / (a + h(t - 1.0));
}

SampleWeight density_weight(const SpectralField& u, double R, Sign sign) {
  SampleWeight w;
  w.e1 = energy_closed_form(u, 1, sign);
  w.chi = bump_chi(w.e1, R);
  w.l4_fourth = quartic_integral(u);
  w.weight = w.chi == 0.0 ? 0.0 : w.chi * std::exp(-sign_value(sign) * w.l4_fourth);
  return w;
}

namespace {

template <class T>
std::vector<T> collect(const EnsembleSpec& spec, const std::function<T(std::size_t)>& task, int workers) {
  auto res = ensemble_map<T>(spec.count, task, workers);
  if (!res.failures.empty())
    throw std::runtime_error("sample " + std::to_string(res.failures.front().index) + " failed: " +
                             res.failures.front().message);
  std::vector<T> out;
  out.reserve(spec.count);
  for (auto& v : res.values) out.push_back(std::move(*v));
  return out;
}

}  // namespace

Estimate tail_probability(const EnsembleSpec& spec, const NormSpec& norm, double lambda, int workers) {
  spec.validate();
  norm.validate();
  const bool l2 = norm.p == 2.0 && norm.s == 0.0;
  const auto hits = collect<double>(
      spec,
      [&](std::size_t i) {
        const auto u = sample_field(spec, i);
        const double v = l2 ? sobolev_norm(u, 0.0) : fl_norm(u, norm);
        return v > lambda ? 1.0 : 0.0;
      },
      workers);
  Estimate e = mean_estimate(hits);
  e.stderr_ = std::sqrt(e.value * (1.0 - e.value) / static_cast<double>(hits.size()));
  return e;
}

MomentEstimate density_moment(const EnsembleSpec& spec, double q, int workers) {
  spec.validate();
  if (!(q >= 1.0)) throw std::invalid_argument("density_moment: q must be >= 1");
  const auto wq = collect<double>(
      spec, [&](std::size_t i) { return std::pow(density_weight(sample_field(spec, i), spec.R, spec.sign).weight, q); },
      workers);
  MomentEstimate m;
  m.moment = mean_estimate(wq);
  double total = 0.0, largest = 0.0;
  for (double v : wq) {
    total += v;
    largest = std::max(largest, v);
  }
  m.max_share = total > 0.0 ? largest / total : 0.0;
  return m;
}

Estimate weighted_expectation(const EnsembleSpec& spec, const std::function<double(const SpectralField&)>& functional,
                              int workers) {
  spec.validate();
  const auto wf = collect<std::pair<double, double>>(
      spec,
      [&](std::size_t i) {
        const auto u = sample_field(spec, i);
        const double w = density_weight(u, spec.R, spec.sign).weight;
        return std::pair{w, w > 0.0 ? functional(u) : 0.0};
      },
      workers);
  std::vector<double> w, f;
  for (const auto& [a, b] : wf) {
    w.push_back(a);
    f.push_back(b);
  }
  return self_normalized(w, f);
}

GagliardoNirenberg gagliardo_nirenberg(const SpectralField& u) {
  const int N = u.max_freq();
  GagliardoNirenberg g;
  g.lhs = lp_physical_norm(u, 4.0, 4 * N + 1).value;
  const double l8 = lp_physical_norm(bessel_potential(u, 0.25), 8.0, 8 * N + 1).value;
  const double l2 = sobolev_norm(u, 0.0);
  g.rhs = std::pow(l8, 0.4) * std::pow(l2, 0.6);
  return g;
}

std::vector<double> empirical_lr_norms(const std::vector<cplx>& a, const std::vector<double>& r, std::uint64_t seed,
                                       std::size_t count) {
  const CounterRng rng(seed);
  std::vector<double> acc(r.size(), 0.0);
  for (std::size_t i = 0; i < count; ++i) {
    cplx x{};
    for (std::size_t j = 0; j < a.size(); ++j) x += a[j] * rng.complex_normal(i, static_cast<std::uint32_t>(j), 1);
    const double m = std::abs(x);
    for (std::size_t k = 0; k < r.size(); ++k) acc[k] += std::pow(m, r[k]);
  }
  for (std::size_t k = 0; k < r.size(); ++k) acc[k] = std::pow(acc[k] / static_cast<double>(count), 1.0 / r[k]);
  return acc;
}

std::string estimator_csv_header() { return "experiment,N,R,sign,q_or_lambda,estimate,stderr,samples,seed"; }

std::string estimator_csv_row(const std::string& experiment, int N, double R, Sign sign, double q_or_lambda,
                              const Estimate& e, std::uint64_t seed) {
  std::ostringstream os;
  os.precision(17);
  os << experiment << ',' << N << ',' << R << ',' << to_string(sign) << ',' << q_or_lambda << ',' << e.value << ','
     << e.stderr_ << ',' << e.samples << ',' << seed;
  return os.str();
}

}  // namespace mkdvlab
