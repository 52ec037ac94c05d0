#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>

#include "mkdvlab/energies.hpp"
#include "mkdvlab/measures.hpp"
#include "mkdvlab/pairing.hpp"

using namespace mkdvlab;

namespace {

int pairing_rank(const IndexTuple& j) {
  std::map<int, std::pair<int, int>> counts;
  for (int i = 0; i < 6; ++i) (i % 2 == 0 ? counts[j[i]].first : counts[j[i]].second) += 1;
  int r = 0;
  for (const auto& [v, c] : counts) r += std::min(c.first, c.second);
  return r;
}

// Subset membership written out from the definitions, positions 1-based.
bool in_subset(const IndexTuple& j, const Subset& s) {
  const auto at = [&](int p) { return j[static_cast<std::size_t>(p - 1)]; };
  switch (s.kind) {
    case SubsetKind::all: return true;
    case SubsetKind::zero: return pairing_rank(j) == 0;
    case SubsetKind::one_pair: return at(s.k) == at(s.l) && pairing_rank(j) == 1;
    case SubsetKind::tilde: return at(3) == at(s.l) && std::set<int>(j.begin(), j.end()).size() == 5;
    case SubsetKind::hat: {
      if (at(3) != at(s.l)) return false;
      for (int p = 1; p <= 6; ++p)
        if (p != 3 && p != s.l && at(p) == at(3)) return true;
      return false;
    }
  }
  return false;
}

std::size_t brute_count(int N, const Subset& s) {
  std::size_t n = 0;
  for (int a = -N; a <= N; ++a)
    for (int b = -N; b <= N; ++b)
      for (int c = -N; c <= N; ++c)
        for (int d = -N; d <= N; ++d)
          for (int e = -N; e <= N; ++e) {
            const int f = a - b + c - d + e;
            if (std::abs(f) > N || std::abs(a - b + c) <= N) continue;
            n += in_subset({a, b, c, d, e, f}, s);
          }
  return n;
}

std::vector<cplx> gaussians(int N, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> d(0.0, std::sqrt(0.5));
  std::vector<cplx> g;
  for (int j = -N; j <= N; ++j) g.emplace_back(d(gen), d(gen));
  return g;
}

double w2(int j) { return 1.0 / (1.0 + static_cast<double>(j) * j); }

}  // namespace

TEST_SUITE("pairing") {

TEST_CASE("frequencies and coefficients") {
  const IndexTuple j{1, 2, 3, 4, 5, 6};
  CHECK(total_frequency(j) == -3);
  CHECK(output_frequency(j) == 2);
  double prod = 1.0;
  for (int v : j) prod *= bracket(v);
  CHECK(coefficient(j) == doctest::Approx(3.0 / prod).epsilon(1e-15));
}

TEST_CASE("pairing classification examples") {
  auto c = classify_pairing({1, 1, 2, 2, 3, 3});
  CHECK(c.r == 3);
  CHECK(c.pairs == std::vector<std::pair<int, int>>{{1, 2}, {3, 4}, {5, 6}});
  CHECK(classify_pairing({1, 2, 3, 4, 5, 6}).r == 0);
  CHECK(classify_pairing({7, 7, 7, 7, 7, 7}).r == 3);
  c = classify_pairing({2, 2, 2, 5, 7, 9});
  CHECK(c.r == 1);
  CHECK(c.pairs == std::vector<std::pair<int, int>>{{1, 2}});
  c = classify_pairing({4, 1, 9, 9, 1, 4});
  CHECK(c.r == 3);
  CHECK(c.pairs == std::vector<std::pair<int, int>>{{1, 6}, {2, 5}, {3, 4}});
  // Same value on two odd positions is not a pair.
  CHECK(classify_pairing({5, 1, 5, 2, 3, 4}).r == 0);
  std::mt19937_64 gen(3);
  std::uniform_int_distribution<int> d(-2, 2);
  for (int k = 0; k < 500; ++k) {
    const IndexTuple j{d(gen), d(gen), d(gen), d(gen), d(gen), d(gen)};
    CHECK(classify_pairing(j).r == pairing_rank(j));
  }
}

TEST_CASE("enumeration counts match brute force") {
  std::vector<Subset> subsets = {Subset::all(), Subset::zero(), Subset::tilde(4), Subset::tilde(6), Subset::hat(4),
                                 Subset::hat(6)};
  for (int k = 1; k <= 6; k += 2)
    for (int l = 2; l <= 6; l += 2) subsets.push_back(Subset::one_pair(k, l));
  for (int N = 1; N <= 5; ++N)
    for (const auto& s : subsets) {
      INFO("N = ", N, ", subset ", s.name());
      std::size_t visited = 0;
      bool ordered = true, members = true;
      IndexTuple prev{};
      enumerate_IN(N, s, [&](const IndexTuple& j) {
        if (visited > 0 && !(prev < j)) ordered = false;
        members = members && total_frequency(j) == 0 && std::abs(output_frequency(j)) > N && in_subset(j, s) &&
                  s.contains(j);
        prev = j;
        ++visited;
      });
      CHECK(ordered);
      CHECK(members);
      CHECK(visited == brute_count(N, s));
      CHECK(count_IN(N, s) == visited);
    }
  CHECK_THROWS_AS(count_IN(65, Subset::zero()), std::invalid_argument);
}

TEST_CASE("same-triplet subsets are empty") {
  const auto subs = same_triplet_subsets();
  REQUIRE(subs.size() == 4);
  for (const auto& s : subs) {
    CHECK(s.kind == SubsetKind::one_pair);
    const bool first = s.k <= 3 && s.l <= 3, second = s.k >= 4 && s.l >= 4;
    CHECK((first || second));
    for (int N : {1, 2, 4, 8, 16}) CHECK(count_IN(N, s) == 0);
  }
}

TEST_CASE("tilde partners conjugate the Gaussian product") {
  const int N = 5;
  const auto g = gaussians(N, 4);
  for (int l : {4, 6}) {
    std::size_t n = 0;
    enumerate_IN(N, Subset::tilde(l), [&](const IndexTuple& j) {
      const auto p = tilde_partner(j, l);
      CHECK(Subset::tilde(l).contains(p));
      CHECK(tilde_partner(p, l) == j);
      CHECK(coefficient(p) == doctest::Approx(coefficient(j)).epsilon(1e-15));
      CHECK(output_frequency(p) == output_frequency(j));
      CHECK(std::abs(gaussian_product(p, g, N) - std::conj(gaussian_product(j, g, N))) < 1e-14);
      ++n;
    });
    CHECK(n > 0);
  }
  CHECK_THROWS_AS(tilde_partner({1, 2, 3, 4, 5, 6}, 5), std::invalid_argument);
}

TEST_CASE("tilde sums cancel while generic sums do not") {
  for (int N = 2; N <= 8; ++N)
    for (unsigned seed = 1; seed <= 5; ++seed) {
      const auto g = gaussians(N, seed * 31 + static_cast<unsigned>(N));
      for (int l : {4, 6}) {
        const auto c = tilde_cancellation(N, l, g);
        CHECK(c.tuples > 0);
        CHECK(c.residual < 1e-12 * c.scale);
      }
      // Negative control: the r = 0 sum has no partner map and its imaginary part survives.
      double scale = 0.0;
      enumerate_IN(N, Subset::zero(), [&](const IndexTuple& j) { scale += std::abs(coefficient(j)); });
      if (scale > 0.0) CHECK(std::abs(im_sum(N, Subset::zero(), g)) > 1e-6 * scale);
    }
}

TEST_CASE("the pairing sum reproduces the physical-space drift") {
  for (int N : {3, 5, 7}) {
    EnsembleSpec spec;
    spec.N = N;
    spec.seed = 77;
    for (std::size_t i = 0; i < 3; ++i) {
      const auto u = sample_field(spec, i);
      std::vector<cplx> g;
      for (int j = -N; j <= N; ++j) g.push_back(ensemble_gaussian(spec.seed, i, j));
      const double physical = e3_drift(u, N);
      const double paired = e3star_prefactor * im_sum(N, Subset::all(), g);
      CHECK(paired == doctest::Approx(physical).epsilon(1e-10));
    }
  }
}

TEST_CASE("Wick expansion: both matching methods agree exactly") {
  for (int N = 1; N <= 2; ++N) {
    const double a = e3star_l2_exact(N, MatchingMethod::recursive);
    const double b = e3star_l2_exact(N, MatchingMethod::permutation);
    CHECK(a == b);
    CHECK(a > 0.0);
  }
  CHECK_THROWS_AS(e3star_l2_exact(4), std::invalid_argument);
}

TEST_CASE("Wick value against Monte Carlo without the cutoff") {
  E3StarSpec spec;
  spec.N = 2;
  spec.samples = 20000;
  spec.seed = 5;
  spec.chi_on = false;
  const auto mc = e3star_l2_mc(spec, 2);
  const double exact = e3star_l2_exact(2);
  CHECK(std::abs(mc.value - exact) < 4 * mc.stderr_);
  CHECK(e3star_l2_mc(spec, 1).value == mc.value);
}

TEST_CASE("lemma sums against direct summation") {
  for (int N : {16, 20}) {
    double zero = 0.0, hat = 0.0, cross = 0.0, logk = 0.0;
    const auto big = [N](int j) { return 3 * std::abs(j) >= N; };
    for (int a = -N; a <= N; ++a)
      for (int b = -N; b <= N; ++b)
        for (int d = -N; d <= N; ++d)
          for (int e = -N; e <= N; ++e)
            for (int f = -N; f <= N; ++f) {
              const double w = w2(a) * w2(b) * w2(d) * w2(e) * w2(f);
              const bool outer = big(d) || big(e) || big(f);
              if (outer) zero += w;
              if (outer || (big(a) && big(b))) hat += w;
            }
    for (int j2 = -N; j2 <= N; ++j2)
      for (int j5 = -N; j5 <= N; ++j5)
        for (int j6 = -N; j6 <= N; ++j6) {
          double inner = 0.0;
          for (int j = -N; j <= N; ++j)
            if (big(j) || big(j5) || big(j6)) inner += w2(j) / (bracket(j2) * bracket(j5) * bracket(j6));
          cross += inner * inner;
        }
    for (int j = -N; j <= N; ++j) logk += 1.0 / (bracket(j) * bracket(N - j));
    CHECK(lemma_sum(LemmaSum::zero_pairing, N) == doctest::Approx(zero).epsilon(1e-10));
    CHECK(lemma_sum(LemmaSum::hat, N) == doctest::Approx(hat).epsilon(1e-10));
    CHECK(lemma_sum(LemmaSum::cross_14, N) == doctest::Approx(cross).epsilon(1e-12));
    CHECK(lemma_sum(LemmaSum::cross_25, N) == lemma_sum(LemmaSum::cross_14, N));
    CHECK(lemma_sum(LemmaSum::log_kernel, N) == doctest::Approx(logk).epsilon(1e-14));
    CHECK(lemma_scaled(LemmaSum::hat, N) == doctest::Approx(hat * N).epsilon(1e-10));
    CHECK(lemma_scaled(LemmaSum::log_kernel, N) == doctest::Approx(logk * N / std::log(N)).epsilon(1e-14));
  }
  for (auto l : {LemmaSum::zero_pairing, LemmaSum::cross_14, LemmaSum::cross_25, LemmaSum::hat, LemmaSum::log_kernel})
    CHECK(parse_lemma(to_string(l)) == l);
  CHECK_THROWS_AS(lemma_sum(LemmaSum::hat, 0), std::invalid_argument);
}

}
