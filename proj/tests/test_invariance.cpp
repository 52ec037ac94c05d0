#include <doctest.h>

#include <cmath>
#include <set>
#include <stdexcept>

#include "mkdvlab/energies.hpp"
#include "mkdvlab/ensemble.hpp"
#include "mkdvlab/invariance.hpp"
#include "mkdvlab/measures.hpp"

using namespace mkdvlab;

TEST_SUITE("invariance") {

TEST_CASE("ensemble_map stores by index and isolates failures") {
  const auto square = [](std::size_t i) -> double {
    if (i == 3 || i == 11) throw std::runtime_error("bad sample " + std::to_string(i));
    return static_cast<double>(i * i);
  };
  for (int workers : {1, 2, 8}) {
    const auto r = ensemble_map<double>(20, square, workers);
    REQUIRE(r.values.size() == 20);
    CHECK(r.completed() == 18);
    REQUIRE(r.failures.size() == 2);
    CHECK(r.failures[0].index == 3);
    CHECK(r.failures[1].index == 11);
    CHECK(r.failures[1].message == "bad sample 11");
    for (std::size_t i = 0; i < 20; ++i) {
      if (i == 3 || i == 11) {
        CHECK_FALSE(r.values[i].has_value());
      } else {
        CHECK(*r.values[i] == static_cast<double>(i * i));
      }
    }
  }
  CHECK(ensemble_map<int>(0, [](std::size_t) { return 1; }, 4).values.empty());
  CHECK_THROWS_AS(ensemble_map<int>(5, [](std::size_t) { return 1; }, 0), std::invalid_argument);
}

TEST_CASE("test set membership") {
  SpectralField u(3);
  u.at(0) = 0.5;
  u.at(2) = cplx(-0.25, 1.0);
  const double e1 = energy_closed_form(u, 1, Sign::defocusing);
  CHECK(TestSet::whole().contains(u));
  CHECK(TestSet::e1_ball(e1 + 1e-9).contains(u));
  CHECK_FALSE(TestSet::e1_ball(e1 - 1e-9).contains(u));
  CHECK(TestSet::half_space(2, -0.25).contains(u));
  CHECK_FALSE(TestSet::half_space(2, -0.3).contains(u));
  const double fl = fl_norm(u, {0.5, 4.0, {}, {}});
  CHECK(TestSet::fl_ball(fl * 1.001, 0.5, 4.0).contains(u));
  CHECK_FALSE(TestSet::fl_ball(fl * 0.999, 0.5, 4.0).contains(u));
  std::set<std::string> names;
  for (const auto& s : {TestSet::whole(), TestSet::e1_ball(4), TestSet::fl_ball(2, 0.5, 4), TestSet::half_space(1, 0)})
    names.insert(s.name());
  CHECK(names.size() == 4);
}

TEST_CASE("zero time gives zero deltas") {
  InvarianceSpec spec;
  spec.N = 6;
  spec.t = 0.0;
  spec.samples = 50;
  spec.sets = {TestSet::whole(), TestSet::e1_ball(2.0), TestSet::half_space(0, 0.0)};
  const auto r = invariance_delta(spec);
  REQUIRE(r.deltas.size() == 3);
  for (const auto& d : r.deltas) {
    CHECK(d.delta.value == 0.0);
    CHECK(d.delta.stderr_ == 0.0);
  }
  CHECK(r.exclusion_rate() == 0.0);
}

TEST_CASE("whole-space delta is consistent with zero and worker independent") {
  InvarianceSpec spec;
  spec.N = 8;
  spec.t = 0.3;
  spec.samples = 400;
  spec.seed = 12;
  spec.sets = {TestSet::whole(), TestSet::e1_ball(4.0)};
  const auto one = invariance_delta(spec, 1);
  const auto three = invariance_delta(spec, 3);
  REQUIRE(one.deltas.size() == 2);
  CHECK(std::abs(one.deltas[0].delta.value) <= 4 * one.deltas[0].delta.stderr_);
  CHECK(one.deltas[0].delta.stderr_ > 0.0);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(one.deltas[k].delta.value == three.deltas[k].delta.value);
    CHECK(one.deltas[k].delta.stderr_ == three.deltas[k].delta.stderr_);
  }
  CHECK(one.exclusion_ok());
}

TEST_CASE("conservation suite") {
  ConservationSpec spec;
  spec.N = 8;
  spec.samples = 2;
  spec.t_final = 0.3;
  spec.intervals = 30000;
  const auto gaussian = conservation_suite(spec, 2);
  CHECK(gaussian.passed());
  CHECK(gaussian.scalar("max_e1_rel_drift").value <= 10 * spec.tol);
  spec.single_mode = true;
  const auto single = conservation_suite(spec);
  CHECK(single.passed());
  CHECK(single.scalar("max_e3_mismatch").value < 1e-9);
}

TEST_CASE("free flow keeps the FL ratio of scaled data fixed") {
  NormGrowthSpec spec;
  spec.N_grid = {8};
  spec.S_grid = {0.5, 2.0};
  spec.samples = 2;
  spec.intervals = 10;
  spec.nonlinear = false;
  const auto r = norm_growth_study(spec);
  CHECK(r.passed());
  REQUIRE(r.rows.size() == 4);
  for (const auto& row : r.rows) {
    const double S = std::stod(row[0]);
    CHECK(std::stod(row[4]) == doctest::Approx(S / (S + 1.0 / S)).epsilon(1e-9));
  }
}

TEST_CASE("convergence data and study") {
  ConvergenceSpec spec;
  spec.N_grid = {4, 8};
  spec.T = 0.05;
  spec.intervals = 5;
  const auto u = convergence_data(spec);
  CHECK(u.max_freq() == 16);
  const double decay = spec.s + 1.0 / spec.p + 0.05;
  for (int n : {-16, -3, 0, 7, 16}) CHECK(std::abs(u[n]) == doctest::Approx(std::pow(bracket(n), -decay)).epsilon(1e-14));
  const auto r = convergence_study(spec);
  CHECK(r.scalar("sup_difference_N4").value > r.scalar("sup_difference_N8").value);
  CHECK(r.scalar("target_exponent").value == doctest::Approx(0.4));
  CHECK(std::isfinite(r.scalar("exponent").value));
}

}
