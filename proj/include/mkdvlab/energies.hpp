#pragma once

#include <array>
#include <string>
#include <vector>

#include "mkdvlab/sign.hpp"
#include "mkdvlab/spectral_field.hpp"

namespace mkdvlab {

inline constexpr int max_recursive_energy = 5;

/// Conserved quantities of the NLS hierarchy evaluated at one state.
struct EnergyReport {
  std::array<double, 5> e{};       // closed forms E_1..E_5
  std::array<cplx, 5> e_rec{};     // int conj(u) w_n, n = 1..5
  double mass = 0.0;               // (1/2pi) int |u|^2
  double momentum = 0.0;           // (1/2pi) Im int conj(u) u_x
  Sign sign = Sign::defocusing;

  std::string csv_header() const;
  std::string csv_row() const;
  std::string to_json() const;
};

/// Grid used for every energy integrand: exact up to degree-6 products of band-N fields.
int energy_grid_size(int N);

/// w_1 = u, w_{n+1} = i d_x w_n +- conj(u) sum_{k=1}^{n-1} w_k w_{n-k}. Element k-1 holds w_k,
/// stored with band k*N so that no product is truncated.
std::vector<SpectralField> w_sequence(const SpectralField& u, int n_max, Sign sign);

/// int conj(u) w_n dx.
cplx energy_recursive(const SpectralField& u, int n, Sign sign);

/// The displayed real energies E_1..E_5 with the sign placed on each quartic or sextic-odd term:
///   E_1 = int |u|^2
///   E_2 = Im int conj(u) u_x
///   E_3 = int |u_x|^2 +- |u|^4
///   E_4 = Im int (u_x conj(u_xx) +- 3 |u|^2 u conj(u_x))
///   E_5 = int |u_xx|^2 +- 6 |u_x|^2 |u|^2 +- |(|u|^2)_x|^2 + 2 |u|^6
double energy_closed_form(const SpectralField& u, int which, Sign sign);

double mass(const SpectralField& u);
double momentum(const SpectralField& u);

/// int |u|^4 by exact quadrature.
double quartic_integral(const SpectralField& u);

EnergyReport energy_report(const SpectralField& u, Sign sign);

/// Time derivative of E_3(Pi_N u) along the truncated flow at u:
///   -24 Re int Pi_{>N}(|Pi_N u|^2 d_x Pi_N u) conj(Pi_N u) |Pi_N u|^2.
/// The value does not depend on the sign branch (the +- of the flow and of E_3 cancel).
double e3_drift(const SpectralField& u, int N);
/// Same with an explicit quadrature grid; rejects M < 6N + 1.
double e3_drift(const SpectralField& u, int N, int M);

}  // namespace mkdvlab
