#include "mkdvlab/energies.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "mkdvlab/fft.hpp"

namespace mkdvlab {

namespace {

// 2 pi sum conj(a_n) b_n: exact int conj(a) b for band-limited fields.
cplx spectral_inner(const SpectralField& a, const SpectralField& b) {
  const int K = std::min(a.max_freq(), b.max_freq());
  cplx acc{};
  for (int n = -K; n <= K; ++n) acc += std::conj(a[n]) * b[n];
  return two_pi * acc;
}

std::vector<cplx> samples(GridTransform& tr, const SpectralField& u) {
  std::vector<cplx> g(static_cast<std::size_t>(tr.size()));
  tr.synthesize(u, g);
  return g;
}

}  // namespace

int energy_grid_size(int N) { return next_fast_size(6 * N + 1); }

std::vector<SpectralField> w_sequence(const SpectralField& u, int n_max, Sign sign) {
  if (n_max < 1 || n_max > max_recursive_energy)
    throw std::invalid_argument("w_sequence: n_max must lie in [1, 5]");
  const int N = u.max_freq();
  const double sigma = sign_value(sign);
  // conj(u) w_k w_{n-k} has band (n+1)N; resolving it exactly needs M >= 2 (n+1) N + 1.
  GridTransform tr(next_fast_size(2 * n_max * N + 1));
  const std::size_t M = static_cast<std::size_t>(tr.size());

  const auto ubar = [&] {
    auto g = samples(tr, u);
    for (auto& z : g) z = std::conj(z);
    return g;
  }();

  std::vector<SpectralField> w;
  std::vector<std::vector<cplx>> w_grid;
  w.push_back(u);
  w_grid.push_back(samples(tr, u));

  for (int n = 1; n < n_max; ++n) {
    const int band = (n + 1) * N;
    SpectralField next = resized(cplx(0.0, 1.0) * derivative(w[n - 1], 1), band);
    if (n >= 2) {
      std::vector<cplx> prod(M, cplx{});
      for (int k = 1; k <= n - 1; ++k) {
        const auto& a = w_grid[static_cast<std::size_t>(k - 1)];
        const auto& b = w_grid[static_cast<std::size_t>(n - k - 1)];
        for (std::size_t m = 0; m < M; ++m) prod[m] += a[m] * b[m];
      }
      for (std::size_t m = 0; m < M; ++m) prod[m] *= ubar[m];
      SpectralField nl(band);
      tr.analyze(prod, band, nl.coeffs());
      next += sigma * nl;
    }
    w_grid.push_back(samples(tr, next));
    w.push_back(std::move(next));
  }
  return w;
}

cplx energy_recursive(const SpectralField& u, int n, Sign sign) {
  const auto w = w_sequence(u, n, sign);
  return spectral_inner(u, w.back());
}

double mass(const SpectralField& u) {
  double acc = 0.0;
  for (const auto& c : u.coeffs()) acc += std::norm(c);
  return acc;
}

double momentum(const SpectralField& u) {
  const int N = u.max_freq();
  double acc = 0.0;
  for (int n = -N; n <= N; ++n) acc += n * std::norm(u[n]);
  return acc;
}

double quartic_integral(const SpectralField& u) {
  GridTransform tr(next_fast_size(4 * u.max_freq() + 1));
  const auto g = samples(tr, u);
  double acc = 0.0;
  for (const auto& z : g) acc += std::norm(z) * std::norm(z);
  return two_pi / tr.size() * acc;
}

double energy_closed_form(const SpectralField& u, int which, Sign sign) {
  const double sigma = sign_value(sign);
  switch (which) {
    case 1:
      return spectral_inner(u, u).real();
    case 2:
      return two_pi * momentum(u);
    default:
      break;
  }
  if (which < 1 || which > 5) throw std::invalid_argument("energy_closed_form: which must lie in [1, 5]");

  GridTransform tr(energy_grid_size(u.max_freq()));
  const double w = two_pi / tr.size();
  const auto g = samples(tr, u);
  const auto gx = samples(tr, derivative(u, 1));
  double acc = 0.0;
  if (which == 3) {
    double quartic = 0.0;
    for (const auto& z : g) quartic += std::norm(z) * std::norm(z);
    double kinetic = 0.0;
    for (const auto& z : gx) kinetic += std::norm(z);
    return w * (kinetic + sigma * quartic);
  }
  const auto gxx = samples(tr, derivative(u, 2));
  for (std::size_t m = 0; m < g.size(); ++m) {
    const double rho = std::norm(g[m]);
    if (which == 4) {
      const cplx f = gx[m] * std::conj(gxx[m]) + 3.0 * sigma * rho * g[m] * std::conj(gx[m]);
      acc += f.imag();
    } else {
      const double rho_x = 2.0 * (std::conj(g[m]) * gx[m]).real();
      acc += std::norm(gxx[m]) + 6.0 * sigma * std::norm(gx[m]) * rho + sigma * rho_x * rho_x +
             2.0 * rho * rho * rho;
    }
  }
  return w * acc;
}

EnergyReport energy_report(const SpectralField& u, Sign sign) {
  EnergyReport r;
  r.sign = sign;
  for (int k = 1; k <= 5; ++k) r.e[static_cast<std::size_t>(k - 1)] = energy_closed_form(u, k, sign);
  const auto w = w_sequence(u, 5, sign);
  for (int k = 1; k <= 5; ++k) r.e_rec[static_cast<std::size_t>(k - 1)] = spectral_inner(u, w[static_cast<std::size_t>(k - 1)]);
  r.mass = mass(u);
  r.momentum = momentum(u);
  return r;
}

std::string EnergyReport::csv_header() const { return "e1,e2,e3,e4,e5,e2_rec_im,mass,momentum,sign"; }

std::string EnergyReport::csv_row() const {
  std::ostringstream os;
  os.precision(17);
  for (double v : e) os << v << ',';
  os << e_rec[1].imag() << ',' << mass << ',' << momentum << ',' << to_string(sign);
  return os.str();
}

std::string EnergyReport::to_json() const {
  nlohmann::ordered_json j;
  for (int k = 0; k < 5; ++k) j["e" + std::to_string(k + 1)] = e[static_cast<std::size_t>(k)];
  j["e2_rec_im"] = e_rec[1].imag();
  j["mass"] = mass;
  j["momentum"] = momentum;
  j["sign"] = to_string(sign);
  return j.dump();
}

double e3_drift(const SpectralField& u, int N) { return e3_drift(u, N, energy_grid_size(N)); }

double e3_drift(const SpectralField& u, int N, int M) {
  if (N < 0) throw std::invalid_argument("e3_drift: N must be nonnegative");
  if (M < 6 * N + 1)
    throw aliasing_error("e3_drift: degree-6 integrand needs M >= 6N+1, got M = " + std::to_string(M));
  const SpectralField v = project_low(u, N);
  GridTransform tr(M);
  const auto g = samples(tr, v);
  const auto gx = samples(tr, derivative(v, 1));
  const std::size_t Ms = g.size();

  std::vector<cplx> cubic(Ms);
  for (std::size_t m = 0; m < Ms; ++m) cubic[m] = std::norm(g[m]) * gx[m];
  SpectralField high(3 * N);
  tr.analyze(cubic, 3 * N, high.coeffs());
  for (int n = -N; n <= N; ++n) high.at(n) = cplx{};
  const auto h = samples(tr, high);

  double acc = 0.0;
  for (std::size_t m = 0; m < Ms; ++m) acc += (h[m] * std::conj(g[m])).real() * std::norm(g[m]);
  return -24.0 * two_pi / static_cast<double>(M) * acc;
}

}  // namespace mkdvlab
