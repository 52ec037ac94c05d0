#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mkdvlab/energies.hpp"
#include "mkdvlab/measures.hpp"

using namespace mkdvlab;

namespace {

EnsembleSpec ensemble(int N, std::size_t count, std::uint64_t seed = 3, Sign s = Sign::defocusing) {
  EnsembleSpec e;
  e.N = N;
  e.count = count;
  e.seed = seed;
  e.sign = s;
  return e;
}

}  // namespace

TEST_SUITE("measures") {

TEST_CASE("bump_chi values and shape") {
  const double R = 4.0;
  CHECK(bump_chi(0.5 * R, R) == 1.0);
  CHECK(bump_chi(R, R) == 1.0);
  CHECK(bump_chi(2.0 * R, R) == 0.0);
  CHECK(bump_chi(2.5 * R, R) == 0.0);
  CHECK(bump_chi(1.5 * R, R) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(bump_chi(-1.5 * R, R) == bump_chi(1.5 * R, R));
  double prev = 1.0;
  for (int k = 0; k <= 100; ++k) {
    const double v = bump_chi(R * (1.0 + k / 100.0), R);
    CHECK(v <= prev);
    CHECK(v >= 0.0);
    prev = v;
  }
  // Symmetric transition: chi(1 + s) + chi(2 - s) = 1.
  for (double s : {0.1, 0.25, 0.4}) CHECK(bump_chi(R * (1 + s), R) + bump_chi(R * (2 - s), R) == doctest::Approx(1.0));
}

TEST_CASE("ensemble shares modes across N and respects the band") {
  for (std::size_t i = 0; i < 5; ++i) {
    const auto a = sample_field(ensemble(4, 10), i);
    const auto b = sample_field(ensemble(9, 10), i);
    for (int j = -4; j <= 4; ++j) CHECK(a[j] == b[j]);
    CHECK(a[2] == ensemble_gaussian(3, i, 2) / (std::sqrt(2 * std::numbers::pi) * bracket(2)));
    auto spec = ensemble(9, 10);
    spec.band = 3;
    const auto c = sample_field(spec, i);
    CHECK(c.max_freq() == 9);
    for (int j = -9; j <= 9; ++j) CHECK(c[j] == (std::abs(j) <= 3 ? b[j] : cplx{}));
  }
  CHECK(sample_field(ensemble(4, 10, 3), 0) != sample_field(ensemble(4, 10, 4), 0));
}

TEST_CASE("ensemble second moments") {
  const std::size_t n = 40000;
  const auto spec = ensemble(1, n, 17);
  double e1 = 0.0, e1sq = 0.0;
  cplx cross{}, pseudo{};
  double var0 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto u = sample_field(spec, i);
    const double v = energy_closed_form(u, 1, Sign::defocusing);
    e1 += v;
    e1sq += v * v;
    cross += u[0] * std::conj(u[1]);
    pseudo += u[1] * u[-1];
    var0 += std::norm(u[0]);
  }
  const double mean = e1 / n;
  const double se = std::sqrt((e1sq / n - mean * mean) / n);
  // E E_1 = sum 1/<j>^2 = 1 + 1/2 + 1/2.
  CHECK(std::abs(mean - 2.0) < 4 * se);
  CHECK(std::abs(var0 / n - 1.0 / (2 * std::numbers::pi)) < 4 * std::sqrt(1.0 / n) / (2 * std::numbers::pi));
  const double scale = 1.0 / (2 * std::numbers::pi);
  CHECK(std::abs(cross / static_cast<double>(n)) < 5 * scale / std::sqrt(n));
  CHECK(std::abs(pseudo / static_cast<double>(n)) < 5 * scale / std::sqrt(n));
}

TEST_CASE("density weight") {
  const auto u = sample_field(ensemble(6, 4), 2);
  const double e1 = energy_closed_form(u, 1, Sign::defocusing);
  const double q = quartic_integral(u);
  for (Sign s : {Sign::defocusing, Sign::focusing}) {
    const auto w = density_weight(u, 4.0, s);
    CHECK(w.e1 == doctest::Approx(e1).epsilon(1e-14));
    CHECK(w.l4_fourth == doctest::Approx(q).epsilon(1e-13));
    CHECK(w.chi == bump_chi(e1, 4.0));
    CHECK(w.weight == doctest::Approx(w.chi * std::exp(-sign_value(s) * q)).epsilon(1e-13));
  }
  SpectralField big(2);
  big.at(0) = 3.0;
  CHECK(density_weight(big, 4.0, Sign::focusing).weight == 0.0);
}

TEST_CASE("tail probability of the single-mode ensemble is exponential") {
  auto spec = ensemble(0, 20000, 5);
  const NormSpec l2{0.0, 2.0, {}, {}};
  for (double lambda : {0.5, 1.0, 1.5}) {
    const auto e = tail_probability(spec, l2, lambda);
    CHECK(std::abs(e.value - std::exp(-lambda * lambda)) < 4 * e.stderr_ + 1e-12);
  }
  const auto one = tail_probability(ensemble(8, 2000, 9), l2, 1.5, 1);
  const auto four = tail_probability(ensemble(8, 2000, 9), l2, 1.5, 4);
  CHECK(one.value == four.value);
  CHECK(one.stderr_ == four.stderr_);
}

TEST_CASE("density moments and weighted expectations") {
  const auto spec = ensemble(4, 500, 21, Sign::focusing);
  double sum = 0.0;
  for (std::size_t i = 0; i < spec.count; ++i) sum += density_weight(sample_field(spec, i), spec.R, spec.sign).weight;
  const auto m = density_moment(spec, 1.0);
  CHECK(m.moment.value == doctest::Approx(sum / static_cast<double>(spec.count)).epsilon(1e-13));
  CHECK(m.max_share > 0.0);
  CHECK(m.max_share <= 1.0);
  CHECK(density_moment(spec, 2.0, 3).moment.value == density_moment(spec, 2.0, 1).moment.value);
  CHECK_THROWS_AS(density_moment(spec, 0.5), std::invalid_argument);
  const auto one = weighted_expectation(spec, [](const SpectralField&) { return 1.0; });
  CHECK(one.value == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("Gagliardo-Nirenberg on single modes and sampled fields") {
  const cplx c(0.6, 0.2);
  for (int m : {0, 2, 5}) {
    const auto g = gagliardo_nirenberg(SpectralField::mode(5, m, c));
    CHECK(g.lhs == doctest::Approx(std::pow(2 * std::numbers::pi, 0.25) * std::abs(c)).epsilon(1e-13));
    CHECK(g.rhs ==
          doctest::Approx(std::pow(bracket(m), 0.1) * std::pow(2 * std::numbers::pi, 0.35) * std::abs(c)).epsilon(1e-13));
  }
  for (std::size_t i = 0; i < 300; ++i) {
    const auto g = gagliardo_nirenberg(sample_field(ensemble(16, 300, 8), i));
    CHECK(g.lhs <= g.rhs);
  }
}

TEST_CASE("empirical L^r norms of Gaussian sums") {
  const std::vector<cplx> a = {cplx(1.0, 0.0), cplx(0.0, 0.5), cplx(-0.3, 0.4)};
  double l2 = 0.0;
  for (auto x : a) l2 += std::norm(x);
  l2 = std::sqrt(l2);
  const std::vector<double> r = {1.0, 2.0, 4.0};
  const auto est = empirical_lr_norms(a, r, 99, 200000);
  for (std::size_t k = 0; k < r.size(); ++k) {
    const double exact = l2 * std::pow(std::tgamma(1.0 + r[k] / 2.0), 1.0 / r[k]);
    CHECK(est[k] == doctest::Approx(exact).epsilon(0.01));
  }
}

TEST_CASE("estimator rows and validation") {
  CHECK(estimator_csv_header() == "experiment,N,R,sign,q_or_lambda,estimate,stderr,samples,seed");
  const auto row = estimator_csv_row("tails", 16, 4.0, Sign::focusing, 1.5, Estimate{0.25, 0.01, 100, false}, 7);
  CHECK(row == "tails,16,4,focusing,1.5,0.25,0.01,100,7");
  EnsembleSpec bad;
  bad.N = -1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = EnsembleSpec{};
  bad.R = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = EnsembleSpec{};
  bad.count = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

}
