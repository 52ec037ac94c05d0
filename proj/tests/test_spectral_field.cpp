#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "mkdvlab/fft.hpp"
#include "mkdvlab/spectral_field.hpp"

using namespace mkdvlab;
using testutil::random_field;

namespace {

SpectralField sum_of_modes(int N, std::initializer_list<int> modes) {
  SpectralField u(N);
  for (int m : modes) u.at(m) += 1.0;
  return u;
}

}  // namespace

TEST_SUITE("spectral_field") {

TEST_CASE("project_low keeps the band and shrinks the container") {
  const auto u = sum_of_modes(5, {1, 5});
  const auto low = project_low(u, 2);
  CHECK(low.max_freq() == 2);
  CHECK(low == sum_of_modes(2, {1}));
  CHECK(project_low(u, 7) == u);
  CHECK(coeff_norm(project_low(sum_of_modes(3, {3}), 2)) == 0.0);
  CHECK(project_low(u, 2, true).max_freq() == 5);
  CHECK_THROWS_AS(project_low(u, -1), std::invalid_argument);
}

TEST_CASE("project_high is the complement") {
  const auto u = sum_of_modes(5, {1, 5});
  CHECK(project_high(u, 2) == sum_of_modes(5, {5}));
  CHECK(coeff_norm(project_high(u, 5)) == 0.0);
  for (unsigned seed = 1; seed <= 5; ++seed) {
    const auto v = random_field(9, seed);
    for (int K : {0, 3, 9, 12}) CHECK(project_low(v, K, true) + project_high(v, K) == v);
  }
}

TEST_CASE("grid synthesis of a single exponential") {
  const auto g = to_grid(SpectralField::mode(1, 1, 1.0), 8);
  REQUIRE(g.size() == 8);
  for (int m = 0; m < 8; ++m) {
    const cplx expect = std::polar(1.0, two_pi * m / 8.0);
    CHECK(std::abs(g.samples[static_cast<std::size_t>(m)] - expect) < 1e-15);
  }
}

TEST_CASE("grid round trip and aliasing guards") {
  for (int N : {0, 1, 4, 13}) {
    const auto u = random_field(N, 7);
    const auto back = from_grid(to_grid(u, 4 * N + 1), N);
    CHECK(coeff_distance(back, u) <= 1e-13 * std::max(coeff_norm(u), 1.0));
  }
  GridField g;
  for (int m = 0; m < 4; ++m) g.samples.push_back(std::polar(1.0, 3.0 * two_pi * m / 4.0));
  CHECK_THROWS_AS(from_grid(g, 2), aliasing_error);
  CHECK_THROWS_AS(to_grid(random_field(4, 1), 8), aliasing_error);
}

TEST_CASE("next_fast_size") {
  CHECK(next_fast_size(1) == 1);
  CHECK(next_fast_size(11) == 12);
  CHECK(next_fast_size(97) == 98);
  CHECK(next_fast_size(129) == 135);
  CHECK(next_fast_size(193) == 196);
}

TEST_CASE("fl_norm values") {
  CHECK(fl_norm(SpectralField::mode(1, 1, 1.0), {0.5, 4.0, {}, {}}) == doctest::Approx(std::pow(2.0, 0.25)).epsilon(1e-15));
  CHECK(fl_norm(SpectralField(3), {0.5, 4.0, {}, {}}) == 0.0);
  CHECK(fl_norm(sum_of_modes(1, {0, 1}), {0.0, 2.0, {}, {}}) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  const auto u = sum_of_modes(3, {-3, 2});
  CHECK(fl_norm(u, {1.0, infinity, {}, {}}) == doctest::Approx(std::sqrt(10.0)).epsilon(1e-15));
}

TEST_CASE("fl_norm is monotone in s and satisfies the triangle inequality") {
  for (unsigned seed = 1; seed <= 20; ++seed) {
    const auto a = random_field(10, seed), b = random_field(10, seed + 100);
    for (double p : {1.0, 2.0, 3.5, 4.0, infinity}) {
      double prev = 0.0;
      for (double s : {-0.5, 0.0, 0.5, 0.9, 2.0}) {
        const NormSpec ns{s, p, {}, {}};
        const double v = fl_norm(a, ns);
        CHECK(v >= prev);
        prev = v;
        CHECK(fl_norm(a + b, ns) <= (fl_norm(a, ns) + fl_norm(b, ns)) * (1 + 1e-14));
      }
    }
  }
}

TEST_CASE("L2 and L4 of single modes and of 1 + e^{ix}") {
  const cplx c(0.3, -1.1);
  const auto u = SpectralField::mode(4, 3, c);
  CHECK(std::pow(sobolev_norm(u, 0.0), 2) == doctest::Approx(two_pi * std::norm(c)).epsilon(1e-14));
  const auto l4 = lp_physical_norm(u, 4.0, 17);
  CHECK(l4.exact);
  CHECK(std::pow(l4.value, 4) == doctest::Approx(two_pi * std::pow(std::abs(c), 4)).epsilon(1e-13));
  // |1 + e^{ix}|^4 = 6 + 8 cos x + 2 cos 2x integrates to 12 pi.
  const auto v = sum_of_modes(1, {0, 1});
  CHECK(std::pow(lp_physical_norm(v, 4.0, 5).value, 4) == doctest::Approx(12.0 * std::numbers::pi).epsilon(1e-14));
  CHECK_FALSE(lp_physical_norm(v, 4.0, 4).exact);
}

TEST_CASE("Parseval and quadrature exactness on random fields") {
  for (unsigned seed = 1; seed <= 10; ++seed) {
    const int N = 3 + static_cast<int>(seed);
    const auto u = random_field(N, seed);
    const double l2 = sobolev_norm(u, 0.0);
    CHECK(testutil::rel(lp_physical_norm(u, 2.0, 2 * N + 1).value, l2) < 1e-12);
    for (int p : {4, 6}) {
      const int M = p * N + 1;
      const double a = lp_physical_norm(u, p, M).value;
      CHECK(testutil::rel(lp_physical_norm(u, p, 2 * M).value, a) < 1e-12);
      CHECK(testutil::rel(lp_physical_norm(u, p, M + 7).value, a) < 1e-12);
    }
  }
}

TEST_CASE("derivative") {
  const auto u = SpectralField::mode(5, 4, 1.0);
  CHECK(derivative(u, 1)[4] == cplx(0.0, 4.0));
  CHECK(derivative(u, 3)[4] == cplx(0.0, -64.0));
  const auto v = random_field(6, 3);
  CHECK(coeff_distance(derivative(derivative(v, 1), 2), derivative(v, 3)) < 1e-12);
  CHECK_THROWS_AS(derivative(v, 0), std::invalid_argument);
}

TEST_CASE("xsb_norm proxy") {
  const int N = 3;
  const double T = 0.5;
  const int K = 512;
  Trajectory zero, free;
  for (int k = 0; k <= K; ++k) {
    const double t = T * k / K;
    zero.times.push_back(t);
    zero.states.emplace_back(N);
    free.times.push_back(t);
    SpectralField s(N);
    for (int n = -N; n <= N; ++n) s.at(n) = std::polar(1.0, static_cast<double>(n) * n * n * t);
    free.states.push_back(s);
  }
  const NormSpec ns{0.5, 2.0, 0.4, 2.0};
  CHECK(xsb_norm(zero, ns, 0.0, T) == 0.0);
  for (int n = -N; n <= N; ++n) {
    const auto sp = windowed_mode_spectrum(free, n, 0.0, T);
    const auto peak = std::max_element(sp.magnitude.begin(), sp.magnitude.end()) - sp.magnitude.begin();
    const double n3 = static_cast<double>(n) * n * n;
    double nearest = sp.tau[0];
    for (double t : sp.tau)
      if (std::abs(t - n3) < std::abs(nearest - n3)) nearest = t;
    CHECK(sp.tau[static_cast<std::size_t>(peak)] == nearest);
  }
  Trajectory scaled = free;
  for (auto& s : scaled.states) s *= cplx(-2.5, 0.0);
  CHECK(xsb_norm(scaled, ns, 0.0, T) == doctest::Approx(2.5 * xsb_norm(free, ns, 0.0, T)).epsilon(1e-12));
  Trajectory bent = free;
  bent.times.back() += 1e-3;
  CHECK_THROWS_AS(xsb_norm(bent, ns, 0.0, T), std::invalid_argument);
}

TEST_CASE("construction rejects malformed input") {
  CHECK_THROWS_AS(SpectralField(-1), std::invalid_argument);
  CHECK_THROWS_AS(SpectralField(1, {1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(SpectralField(0, {cplx(NAN, 0.0)}), std::invalid_argument);
  SpectralField u(2);
  CHECK_THROWS_AS(u.at(3), std::out_of_range);
  CHECK(u[7] == cplx{});
}

}
