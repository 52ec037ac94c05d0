#include "mkdvlab/invariance.hpp"

#include <chrono>
#include <cmath>
#include <set>

#include "mkdvlab/energies.hpp"
#include "mkdvlab/measures.hpp"
#include "mkdvlab/rng.hpp"

namespace mkdvlab {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string num(double v) { return format_number(v); }

}  // namespace

bool TestSet::contains(const SpectralField& u) const {
  switch (kind) {
    case Kind::whole: return true;
    case Kind::e1_ball: return energy_closed_form(u, 1, Sign::defocusing) <= r;
    case Kind::fl_ball: return fl_norm(u, NormSpec{s, p, {}, {}}) <= r;
    case Kind::half_space: return u[n0].real() <= r;
  }
  return false;
}

std::string TestSet::name() const {
  switch (kind) {
    case Kind::whole: return "whole";
    case Kind::e1_ball: return "e1_ball";
    case Kind::fl_ball: return "fl_ball";
    case Kind::half_space: return "half_space";
  }
  return "?";
}

double InvarianceResult::exclusion_rate() const {
  return samples == 0 ? 0.0 : static_cast<double>(excluded.size()) / static_cast<double>(samples);
}

InvarianceResult invariance_delta(const InvarianceSpec& spec, int workers) {
  if (spec.sets.empty()) throw std::invalid_argument("invariance_delta: no test sets");
  if (spec.t < 0.0 || spec.t > 2.0) throw std::invalid_argument("invariance_delta: t must lie in [0, 2]");
  EnsembleSpec es{spec.N, spec.seed, spec.samples, spec.sign, spec.R, -1};
  es.validate();
  FlowConfig cfg;
  cfg.N = spec.N;
  cfg.sign = spec.sign;
  cfg.tol = spec.tol;
  cfg.dt = spec.dt;
  cfg.t_final = spec.t;

  struct PerSample {
    double weight = 0.0;
    double factor = 0.0;  // e^{-dE3} - 1
    std::vector<char> in_set;
  };
  auto res = ensemble_map<PerSample>(
      spec.samples,
      [&](std::size_t i) {
        const auto v = sample_field(es, i);
        PerSample ps;
        ps.weight = density_weight(v, spec.R, spec.sign).weight;
        for (const auto& A : spec.sets) ps.in_set.push_back(A.contains(v));
        if (ps.weight > 0.0 && spec.t > 0.0) {
          ps.factor = std::expm1(-evolve_with_drift(v, spec.t, cfg).e3_change);
        }
        return ps;
      },
      workers);

  InvarianceResult out;
  out.samples = spec.samples;
  out.excluded = res.failures;
  for (std::size_t a = 0; a < spec.sets.size(); ++a) {
    std::vector<double> w, f;
    for (const auto& v : res.values) {
      if (!v) continue;
      w.push_back(v->weight);
      f.push_back(v->in_set[a] ? v->factor : 0.0);
    }
    out.deltas.push_back({spec.sets[a], self_normalized(w, f)});
  }
  return out;
}

// ---------------------------------------------------------------------------------------------

ExperimentResult conservation_suite(const ConservationSpec& spec, int workers) {
  const auto t0 = std::chrono::steady_clock::now();
  if (spec.intervals < 2) throw std::invalid_argument("conservation_suite: need at least two intervals");
  EnsembleSpec es{spec.N, spec.seed, spec.samples, spec.sign, 1.0, -1};
  es.validate();
  FlowConfig cfg;
  cfg.N = spec.N;
  cfg.sign = spec.sign;
  cfg.tol = spec.tol;
  cfg.t_final = spec.t_final;
  const auto times = uniform_times(spec.t_final, spec.intervals);

  struct Row {
    double e1_rel, e2, momentum, e3_change, e3_integrated;
  };
  auto res = ensemble_map<Row>(
      spec.samples,
      [&](std::size_t i) {
        SpectralField u0(spec.N);
        if (spec.single_mode) {
          const int m = 1 + static_cast<int>(i % static_cast<std::size_t>(spec.N));
          u0.at(m) = 0.5 * CounterRng(spec.seed).complex_normal(i, static_cast<std::uint32_t>(m));
        } else {
          u0 = sample_field(es, i);
        }
        const auto traj = flow(u0, cfg, times);
        const auto& u1 = traj.states.back();
        Row r{};
        const double e1 = energy_closed_form(u0, 1, spec.sign);
        r.e1_rel = e1 == 0.0 ? 0.0 : std::abs(energy_closed_form(u1, 1, spec.sign) - e1) / e1;
        r.e2 = energy_closed_form(u1, 2, spec.sign) - energy_closed_form(u0, 2, spec.sign);
        r.momentum = momentum(u1) - momentum(u0);
        r.e3_change = energy_closed_form(u1, 3, spec.sign) - energy_closed_form(u0, 3, spec.sign);
        double acc = 0.0, prev = e3_drift(u0, spec.N);
        for (std::size_t k = 1; k < traj.size(); ++k) {
          const double cur = e3_drift(traj.states[k], spec.N);
          acc += 0.5 * (traj.times[k] - traj.times[k - 1]) * (prev + cur);
          prev = cur;
        }
        r.e3_integrated = acc;
        return r;
      },
      workers);

  ExperimentResult out;
  out.name = "conservation";
  out.parameters = {{"N", spec.N},           {"sign", to_string(spec.sign)}, {"t_final", spec.t_final},
                    {"samples", spec.samples}, {"seed", spec.seed},          {"tol", spec.tol},
                    {"intervals", spec.intervals}, {"single_mode", spec.single_mode},
                    {"e3_tolerance", spec.e3_tolerance}};
  out.failures = res.failures;
  out.columns = {"index", "e1_rel_drift", "e2_drift", "momentum_drift", "e3_change", "e3_integrated", "e3_mismatch"};
  double worst_e1 = 0.0, worst_mismatch = 0.0, worst_p = 0.0;
  for (std::size_t i = 0; i < res.values.size(); ++i) {
    if (!res.values[i]) continue;
    const Row& r = *res.values[i];
    const double scale = std::max(std::abs(r.e3_change), std::abs(r.e3_integrated));
    const double diff = std::abs(r.e3_change - r.e3_integrated);
    const double mismatch = scale > 1e-9 ? diff / scale : diff;
    worst_e1 = std::max(worst_e1, r.e1_rel);
    worst_mismatch = std::max(worst_mismatch, mismatch);
    worst_p = std::max(worst_p, std::abs(r.momentum));
    out.rows.push_back({std::to_string(i), num(r.e1_rel), num(r.e2), num(r.momentum), num(r.e3_change),
                        num(r.e3_integrated), num(mismatch)});
  }
  out.add("max_e1_rel_drift", worst_e1, 0.0, true);
  out.add("max_momentum_drift", worst_p, 0.0, true);
  out.add("max_e3_mismatch", worst_mismatch, 0.0, true);
  out.check("e1_drift_within_10_tol", worst_e1 <= 10.0 * spec.tol, "max " + num(worst_e1));
  out.check("e3_change_matches_drift_integral", worst_mismatch <= spec.e3_tolerance, "max " + num(worst_mismatch));
  out.check("no_failed_samples", res.failures.empty());
  out.wall_clock = seconds_since(t0);
  return out;
}

// ---------------------------------------------------------------------------------------------

ExperimentResult norm_growth_study(const NormGrowthSpec& spec, int workers) {
  const auto t0 = std::chrono::steady_clock::now();
  if (spec.S_grid.empty() || spec.N_grid.empty()) throw std::invalid_argument("norm_growth_study: empty grid");
  const NormSpec ns{spec.s, spec.p, {}, {}};
  ns.validate();
  const auto times = uniform_times(spec.t_max, spec.intervals);

  struct Job {
    double S;
    int N;
    std::size_t sample;
  };
  std::vector<Job> jobs;
  for (double S : spec.S_grid)
    for (int N : spec.N_grid)
      for (std::size_t i = 0; i < spec.samples; ++i) jobs.push_back({S, N, i});

  struct Row {
    double window, max_ratio, initial_ratio;
  };
  auto res = ensemble_map<Row>(
      jobs.size(),
      [&](std::size_t k) {
        const Job& jb = jobs[k];
        EnsembleSpec es{jb.N, spec.seed, spec.samples, spec.sign, 1.0, -1};
        auto u0 = sample_field(es, jb.sample);
        u0 *= jb.S / fl_norm(u0, ns);
        FlowConfig cfg;
        cfg.N = jb.N;
        cfg.sign = spec.sign;
        cfg.tol = spec.tol;
        cfg.nonlinear = spec.nonlinear;
        const auto traj = flow(u0, cfg, times);
        const double bound = jb.S + 1.0 / jb.S;
        Row r{0.0, 0.0, fl_norm(u0, ns) / bound};
        bool inside = true;
        for (std::size_t i = 0; i < traj.size(); ++i) {
          const double ratio = fl_norm(traj.states[i], ns) / bound;
          r.max_ratio = std::max(r.max_ratio, ratio);
          if (inside && ratio <= 1.0)
            r.window = traj.times[i];
          else
            inside = false;
        }
        return r;
      },
      workers);

  ExperimentResult out;
  out.name = "norm-growth";
  out.parameters = {{"S_grid", spec.S_grid}, {"N_grid", spec.N_grid}, {"s", spec.s},
                    {"p", spec.p},           {"samples", spec.samples}, {"seed", spec.seed},
                    {"t_max", spec.t_max},   {"intervals", spec.intervals}, {"tol", spec.tol},
                    {"sign", to_string(spec.sign)}, {"nonlinear", spec.nonlinear}};
  out.failures = res.failures;
  out.columns = {"S", "N", "sample", "window", "max_ratio"};
  bool initial_ok = true;
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    if (!res.values[k]) continue;
    const Row& r = *res.values[k];
    initial_ok = initial_ok && r.initial_ratio <= 1.0;
    out.rows.push_back({num(jobs[k].S), std::to_string(jobs[k].N), std::to_string(jobs[k].sample), num(r.window),
                        num(r.max_ratio)});
  }
  for (double S : spec.S_grid)
    for (int N : spec.N_grid) {
      double w = spec.t_max;
      for (std::size_t k = 0; k < jobs.size(); ++k)
        if (jobs[k].S == S && jobs[k].N == N && res.values[k]) w = std::min(w, res.values[k]->window);
      out.add("min_window_S" + num(S) + "_N" + std::to_string(N), w, 0.0, true);
    }
  out.check("initial_ratio_at_most_one", initial_ok);
  out.check("no_failed_samples", res.failures.empty());
  out.wall_clock = seconds_since(t0);
  return out;
}

// ---------------------------------------------------------------------------------------------

SpectralField convergence_data(const ConvergenceSpec& spec) {
  if (spec.N_grid.empty()) throw std::invalid_argument("convergence_data: empty N grid");
  const int K = 2 * *std::max_element(spec.N_grid.begin(), spec.N_grid.end());
  const double alpha = spec.s + 1.0 / spec.p + 0.05;
  const CounterRng rng(spec.seed);
  SpectralField u(K);
  for (int n = -K; n <= K; ++n) {
    const double theta = two_pi * rng.uniforms(0, static_cast<std::uint32_t>(n), 2).first;
    u.at(n) = std::polar(spec.amplitude * std::pow(bracket(n), -alpha), theta);
  }
  return u;
}

ExperimentResult convergence_study(const ConvergenceSpec& spec, int workers) {
  const auto t0 = std::chrono::steady_clock::now();
  if (spec.N_grid.size() < 2) throw std::invalid_argument("convergence_study: need at least two N values");
  const auto u0 = convergence_data(spec);
  const auto times = uniform_times(spec.T, spec.intervals);
  std::set<int> all;
  for (int N : spec.N_grid) {
    all.insert(N);
    all.insert(2 * N);
  }
  const std::vector<int> levels(all.begin(), all.end());
  auto res = ensemble_map<Trajectory>(
      levels.size(),
      [&](std::size_t k) {
        FlowConfig cfg;
        cfg.N = levels[k];
        cfg.sign = spec.sign;
        cfg.tol = spec.tol;
        return flow(u0, cfg, times);
      },
      workers);
  if (!res.failures.empty()) throw integration_error("convergence_study: " + res.failures.front().message);
  const auto traj_at = [&](int N) -> const Trajectory& {
    return *res.values[static_cast<std::size_t>(std::find(levels.begin(), levels.end(), N) - levels.begin())];
  };

  ExperimentResult out;
  out.name = "convergence";
  out.parameters = {{"N_grid", spec.N_grid}, {"s", spec.s},         {"s_prime", spec.s_prime},
                    {"p", spec.p},           {"T", spec.T},         {"intervals", spec.intervals},
                    {"amplitude", spec.amplitude}, {"seed", spec.seed}, {"tol", spec.tol},
                    {"sign", to_string(spec.sign)}};
  out.columns = {"N", "sup_difference"};
  const NormSpec ns{spec.s_prime, spec.p, {}, {}};
  std::vector<double> x, y;
  for (int N : spec.N_grid) {
    const auto& a = traj_at(N);
    const auto& b = traj_at(2 * N);
    double sup = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sup = std::max(sup, fl_norm(a.states[i] - b.states[i], ns));
    out.rows.push_back({std::to_string(N), num(sup)});
    out.add("sup_difference_N" + std::to_string(N), sup, 0.0, true);
    x.push_back(std::log2(static_cast<double>(N)));
    y.push_back(std::log2(sup));
  }
  const LineFit fit = fit_line(x, y);
  const double exponent = -fit.slope;
  out.add("exponent", exponent, fit.slope_stderr);
  out.add("target_exponent", spec.s - spec.s_prime, 0.0, true);
  const double gap = spec.s - spec.s_prime;
  out.check("exponent_within_half_to_three_halves_of_gap", exponent >= 0.5 * gap && exponent <= 1.5 * gap,
            "exponent " + num(exponent));
  out.wall_clock = seconds_since(t0);
  return out;
}

}  // namespace mkdvlab
