#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "mkdvlab/rng.hpp"
#include "mkdvlab/stats.hpp"

using namespace mkdvlab;

namespace {

// Exact one-sided p-value of the Mann-Kendall statistic by enumerating all orderings.
double mk_p_by_enumeration(const std::vector<double>& y) {
  auto s_of = [](const std::vector<double>& v) {
    int s = 0;
    for (std::size_t i = 0; i < v.size(); ++i)
      for (std::size_t j = i + 1; j < v.size(); ++j) s += (v[j] > v[i]) - (v[j] < v[i]);
    return s;
  };
  const int observed = s_of(y);
  std::vector<double> perm(y);
  std::sort(perm.begin(), perm.end());
  long total = 0, hits = 0;
  do {
    ++total;
    if (s_of(perm) <= observed) ++hits;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(hits) / static_cast<double>(total);
}

}  // namespace

TEST_SUITE("rng_stats") {

TEST_CASE("philox known answers") {
  using A4 = std::array<std::uint32_t, 4>;
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("counter draws are pure functions of their coordinates") {
  const CounterRng a(42), b(42), c(43);
  CHECK(a.uniforms(7, 3, 1) == b.uniforms(7, 3, 1));
  CHECK(a.complex_normal(7, 3) == b.complex_normal(7, 3));
  CHECK(a.uniforms(7, 3, 1) != a.uniforms(7, 3, 2));
  CHECK(a.uniforms(7, 3) != a.uniforms(8, 3));
  CHECK(a.uniforms(7, 3) != c.uniforms(7, 3));
  // Seeds differing only in the high word give different streams.
  CHECK(CounterRng(1).uniforms(0, 0) != CounterRng(1 + (std::uint64_t{1} << 32)).uniforms(0, 0));
}

TEST_CASE("uniforms and complex normals have the right moments") {
  const CounterRng rng(2024);
  const int n = 200000;
  double su = 0, suu = 0, umin = 1, umax = 0;
  cplx sg{}, sg2{};
  double sabs = 0, sabs4 = 0;
  for (int i = 0; i < n; ++i) {
    const auto [u1, u2] = rng.uniforms(static_cast<std::uint64_t>(i), 5);
    for (double u : {u1, u2}) {
      su += u;
      suu += u * u;
      umin = std::min(umin, u);
      umax = std::max(umax, u);
    }
    const cplx g = rng.complex_normal(static_cast<std::uint64_t>(i), 9);
    sg += g;
    sg2 += g * g;
    sabs += std::norm(g);
    sabs4 += std::norm(g) * std::norm(g);
  }
  CHECK(umin > 0.0);
  CHECK(umax < 1.0);
  const double m = su / (2 * n);
  CHECK(std::abs(m - 0.5) < 5 * std::sqrt(1.0 / 12 / (2 * n)));
  CHECK(std::abs(suu / (2 * n) - 1.0 / 3) < 5 * std::sqrt((1.0 / 5 - 1.0 / 9) / (2 * n)));
  const double se = std::sqrt(0.5 / n);
  CHECK(std::abs(sg.real() / n) < 5 * se);
  CHECK(std::abs(sg.imag() / n) < 5 * se);
  CHECK(std::abs(sabs / n - 1.0) < 5 * std::sqrt(1.0 / n));
  CHECK(std::abs(sg2 / static_cast<double>(n)) < 5 * std::sqrt(1.0 / n));
  // E|g|^4 = 2 for a complex Gaussian.
  CHECK(std::abs(sabs4 / n - 2.0) < 5 * std::sqrt(20.0 / n));
}

TEST_CASE("mean and jackknife estimates") {
  const std::vector<double> x = {1, 2, 3, 4};
  const auto m = mean_estimate(x);
  CHECK(m.value == 2.5);
  CHECK(m.stderr_ == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)).epsilon(1e-14));
  CHECK(m.samples == 4);
  CHECK_FALSE(m.exact);
  const std::vector<double> sq = {1, 4, 9, 16};
  const auto r = rms_jackknife(sq);
  CHECK(r.value == doctest::Approx(2.7386127875258306).epsilon(1e-15));
  CHECK(r.stderr_ == doctest::Approx(0.624671654498887).epsilon(1e-13));
}

TEST_CASE("self-normalized estimates") {
  const std::vector<double> f = {1.0, 3.0, -2.0, 5.0};
  const std::vector<double> ones(4, 1.0), threes(4, 3.0);
  CHECK(self_normalized(ones, f).value == doctest::Approx(mean_estimate(f).value).epsilon(1e-15));
  CHECK(self_normalized(threes, f).value == doctest::Approx(self_normalized(ones, f).value).epsilon(1e-15));
  CHECK(self_normalized(threes, f).stderr_ == doctest::Approx(self_normalized(ones, f).stderr_).epsilon(1e-14));
  const std::vector<double> w = {0.0, 2.0, 0.0, 1.0};
  CHECK(self_normalized(w, f).value == doctest::Approx((2.0 * 3.0 + 5.0) / 3.0).epsilon(1e-15));
  const std::vector<double> zeros(4, 0.0);
  CHECK_THROWS_AS(self_normalized(zeros, f), std::domain_error);
}

TEST_CASE("line fits") {
  const std::vector<double> x = {0, 1, 2, 3};
  std::vector<double> y;
  for (double v : x) y.push_back(2.0 + 3.0 * v);
  const auto exact = fit_line(x, y);
  CHECK(exact.slope == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(exact.intercept == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(exact.slope_stderr < 1e-12);
  const std::vector<double> x3 = {0, 1, 2}, y3 = {0.0, 1.0, 2.5}, s3 = {1, 1, 1};
  const auto w = fit_line(x3, y3, s3);
  CHECK(w.slope == doctest::Approx(1.25).epsilon(1e-14));
  CHECK(w.slope_stderr == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
  CHECK(w.ci_low == doctest::Approx(1.25 - 1.96 * std::sqrt(0.5)).epsilon(1e-14));
  CHECK(w.ci_high == doctest::Approx(1.25 + 1.96 * std::sqrt(0.5)).epsilon(1e-14));
  // Doubling one sigma lowers that point's pull on the slope.
  const std::vector<double> s3b = {1, 1, 2};
  CHECK(fit_line(x3, y3, s3b).slope < w.slope);
}

TEST_CASE("Mann-Kendall exact p-values") {
  CHECK(mann_kendall_decreasing(std::vector<double>{3, 2, 1}).statistic == -3);
  CHECK(mann_kendall_decreasing(std::vector<double>{3, 2, 1}).p_value == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(mann_kendall_decreasing(std::vector<double>{4, 3, 2, 1}).p_value ==
        doctest::Approx(1.0 / 24.0).epsilon(1e-15));
  CHECK(mann_kendall_decreasing(std::vector<double>{1, 2, 3}).p_value == 1.0);
  const std::vector<std::vector<double>> cases = {
      {5, 4, 1, 3, 2}, {1, 5, 2, 4, 3}, {2, 1, 3, 5, 4}, {6, 5, 4, 1, 3, 2}, {3, 7, 1, 6, 5, 2, 4}};
  for (const auto& y : cases) CHECK(mann_kendall_decreasing(y).p_value == doctest::Approx(mk_p_by_enumeration(y)));
  // Mahonian counts for four points: five or more inversions in 4 of 24 orderings.
  CHECK(mann_kendall_decreasing(std::vector<double>{4, 3, 1, 2}).p_value == doctest::Approx(4.0 / 24.0).epsilon(1e-15));
  CHECK_THROWS_AS(mann_kendall_decreasing(std::vector<double>{1}), std::invalid_argument);
  CHECK_THROWS_AS(mann_kendall_decreasing(std::vector<double>(11, 0.0)), std::invalid_argument);
}

}
