#include "mkdvlab/pairing.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "mkdvlab/energies.hpp"
#include "mkdvlab/ensemble.hpp"
#include "mkdvlab/measures.hpp"

namespace mkdvlab {

int total_frequency(const IndexTuple& j) { return j[0] - j[1] + j[2] - j[3] + j[4] - j[5]; }

int output_frequency(const IndexTuple& j) { return j[0] - j[1] + j[2]; }

double coefficient(const IndexTuple& j) {
  double d = 1.0;
  for (int v : j) d *= bracket(v);
  return j[2] / d;
}

PairingClass classify_pairing(const IndexTuple& j) {
  PairingClass pc;
  std::vector<bool> used(6, false);
  for (int a = 0; a < 6; a += 2) {
    for (int b = 1; b < 6; b += 2) {
      if (used[static_cast<std::size_t>(b)] || j[static_cast<std::size_t>(a)] != j[static_cast<std::size_t>(b)]) continue;
      used[static_cast<std::size_t>(b)] = true;
      pc.pairs.emplace_back(std::min(a, b) + 1, std::max(a, b) + 1);
      break;
    }
  }
  std::sort(pc.pairs.begin(), pc.pairs.end());
  pc.r = static_cast<int>(pc.pairs.size());
  return pc;
}

// ---------------------------------------------------------------------------------------------

Subset Subset::one_pair(int k, int l) {
  if (k > l) std::swap(k, l);
  if (k < 1 || l > 6 || k == l || (k + l) % 2 == 0)
    throw std::invalid_argument("Subset::one_pair: positions must be distinct with opposite signatures");
  return {SubsetKind::one_pair, k, l};
}

bool Subset::contains(const IndexTuple& j) const {
  const auto at = [&](int p) { return j[static_cast<std::size_t>(p - 1)]; };
  switch (kind) {
    case SubsetKind::all: return true;
    case SubsetKind::zero: return classify_pairing(j).r == 0;
    case SubsetKind::one_pair: return at(k) == at(l) && classify_pairing(j).r == 1;
    case SubsetKind::tilde: {
      if (at(k) != at(l)) return false;
      std::array<int, 6> s = j;
      std::sort(s.begin(), s.end());
      return std::unique(s.begin(), s.end()) - s.begin() == 5;
    }
    case SubsetKind::hat: {
      if (at(k) != at(l)) return false;
      for (int p = 1; p <= 6; ++p)
        if (p != k && p != l && at(p) == at(k)) return true;
      return false;
    }
  }
  return false;
}

std::string Subset::name() const {
  switch (kind) {
    case SubsetKind::all: return "all";
    case SubsetKind::zero: return "zero";
    case SubsetKind::one_pair: return "pair_" + std::to_string(k) + std::to_string(l);
    case SubsetKind::tilde: return "tilde_" + std::to_string(k) + std::to_string(l);
    case SubsetKind::hat: return "hat_" + std::to_string(k) + std::to_string(l);
  }
  return "?";
}

void enumerate_IN(int N, const Subset& subset, const std::function<void(const IndexTuple&)>& visit, int cap) {
  if (N < 0) throw std::invalid_argument("enumerate_IN: N must be nonnegative");
  if (N > cap) throw std::invalid_argument("enumerate_IN: N exceeds enumeration cap " + std::to_string(cap));
  const bool tied = subset.kind == SubsetKind::one_pair || subset.kind == SubsetKind::tilde ||
                    subset.kind == SubsetKind::hat;
  const int k = subset.k, l = subset.l;
  IndexTuple j{};
  for (j[0] = -N; j[0] <= N; ++j[0])
    for (j[1] = -N; j[1] <= N; ++j[1])
      for (j[2] = -N; j[2] <= N; ++j[2]) {
        const int P = output_frequency(j);
        if (std::abs(P) <= N) continue;
        if (tied && l <= 3 && j[static_cast<std::size_t>(k - 1)] != j[static_cast<std::size_t>(l - 1)]) continue;
        int lo4 = -N, hi4 = N;
        if (tied && l == 4) lo4 = hi4 = j[static_cast<std::size_t>(k - 1)];
        for (j[3] = lo4; j[3] <= hi4; ++j[3]) {
          // j5 fixed by the tie where one of j5, j6 is involved; with j6 = P - j4 + j5.
          int lo5 = -N, hi5 = N;
          if (tied && l >= 5) {
            if (l == 5) {
              lo5 = hi5 = j[static_cast<std::size_t>(k - 1)];
            } else if (k == 5) {  // j6 = j5 forces j4 = P
              if (j[3] != P) continue;
            } else {  // j6 = j_k
              lo5 = hi5 = j[static_cast<std::size_t>(k - 1)] - P + j[3];
            }
          }
          lo5 = std::max(lo5, -N);
          hi5 = std::min(hi5, N);
          for (j[4] = lo5; j[4] <= hi5; ++j[4]) {
            j[5] = P - j[3] + j[4];
            if (std::abs(j[5]) > N) continue;
            if (subset.contains(j)) visit(j);
          }
        }
      }
}

std::size_t count_IN(int N, const Subset& subset, int cap) {
  std::size_t n = 0;
  enumerate_IN(N, subset, [&](const IndexTuple&) { ++n; }, cap);
  return n;
}

std::vector<Subset> same_triplet_subsets() {
  return {Subset::one_pair(5, 6), Subset::one_pair(4, 5), Subset::one_pair(2, 3), Subset::one_pair(1, 2)};
}

cplx gaussian_product(const IndexTuple& j, std::span<const cplx> g, int N) {
  cplx p{1.0, 0.0};
  for (std::size_t i = 0; i < 6; ++i) {
    const cplx z = g[static_cast<std::size_t>(j[i] + N)];
    p *= (i % 2 == 0) ? z : std::conj(z);
  }
  return p;
}

double im_sum(int N, const Subset& subset, std::span<const cplx> g) {
  if (g.size() != static_cast<std::size_t>(2 * N + 1)) throw std::invalid_argument("im_sum: need 2N+1 Gaussians");
  double acc = 0.0;
  enumerate_IN(N, subset, [&](const IndexTuple& j) { acc += coefficient(j) * gaussian_product(j, g, N).imag(); });
  return acc;
}

IndexTuple tilde_partner(const IndexTuple& j, int l) {
  if (l == 4) return {j[5], j[4], j[2], j[2], j[1], j[0]};
  if (l == 6) return {j[3], j[4], j[2], j[0], j[1], j[2]};
  throw std::invalid_argument("tilde_partner: l must be 4 or 6");
}

CancellationResult tilde_cancellation(int N, int l, std::span<const cplx> g) {
  if (N > 16) throw std::invalid_argument("tilde_cancellation: N must be <= 16");
  if (g.size() != static_cast<std::size_t>(2 * N + 1))
    throw std::invalid_argument("tilde_cancellation: need 2N+1 Gaussians");
  CancellationResult r;
  double acc = 0.0;
  enumerate_IN(N, Subset::tilde(l), [&](const IndexTuple& j) {
    const cplx z = coefficient(j) * gaussian_product(j, g, N);
    acc += z.imag();
    r.scale += std::abs(z);
    ++r.tuples;
  });
  r.residual = std::abs(acc);
  return r;
}

// ---------------------------------------------------------------------------------------------

std::string to_string(LemmaSum l) {
  switch (l) {
    case LemmaSum::zero_pairing: return "zero_pairing";
    case LemmaSum::cross_14: return "cross_14";
    case LemmaSum::cross_25: return "cross_25";
    case LemmaSum::hat: return "hat";
    case LemmaSum::log_kernel: return "log_kernel";
  }
  return "?";
}

LemmaSum parse_lemma(const std::string& text) {
  for (LemmaSum l : {LemmaSum::zero_pairing, LemmaSum::cross_14, LemmaSum::cross_25, LemmaSum::hat, LemmaSum::log_kernel})
    if (to_string(l) == text) return l;
  throw std::invalid_argument("unknown lemma sum '" + text + "'");
}

double lemma_sum(LemmaSum lemma, int N) {
  if (N < 1) throw std::invalid_argument("lemma_sum: N must be >= 1");
  if (lemma == LemmaSum::log_kernel) {
    double acc = 0.0;
    for (int j = -N; j <= N; ++j) acc += 1.0 / (bracket(j) * bracket(N - j));
    return acc;
  }
  double S = 0.0, T = 0.0;
  for (int j = -N; j <= N; ++j) {
    const double w = 1.0 / (1.0 + static_cast<double>(j) * j);
    S += w;
    if (3 * std::abs(j) < N) T += w;
  }
  const double tail = S - T;
  switch (lemma) {
    case LemmaSum::zero_pairing: return S * S * (S * S * S - T * T * T);
    case LemmaSum::cross_14:
    case LemmaSum::cross_25: return S * (S * S * (S * S - T * T) + tail * tail * T * T);
    case LemmaSum::hat: return S * S * (S * S * S - T * T * T) + tail * tail * T * T * T;
    default: break;
  }
  return 0.0;
}

double lemma_scaled(LemmaSum lemma, int N) {
  const double v = lemma_sum(lemma, N) * N;
  return lemma == LemmaSum::log_kernel ? v / std::log(static_cast<double>(N)) : v;
}

// ---------------------------------------------------------------------------------------------

namespace {

// Number of bijections between `plain` and `conj` matching equal values.
long matchings_recursive(const std::array<int, 6>& plain, const std::array<int, 6>& conj, int pos, unsigned used) {
  if (pos == 6) return 1;
  long total = 0;
  for (int b = 0; b < 6; ++b)
    if (!(used & (1u << b)) && plain[static_cast<std::size_t>(pos)] == conj[static_cast<std::size_t>(b)])
      total += matchings_recursive(plain, conj, pos + 1, used | (1u << b));
  return total;
}

long matchings_permutation(const std::array<int, 6>& plain, const std::array<int, 6>& conj) {
  std::array<int, 6> perm{0, 1, 2, 3, 4, 5};
  long total = 0;
  do {
    bool ok = true;
    for (std::size_t i = 0; i < 6 && ok; ++i) ok = plain[i] == conj[static_cast<std::size_t>(perm[i])];
    total += ok;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

using Signature = std::vector<std::pair<int, int>>;  // value -> (#odd - #even), nonzero entries

Signature signature(const IndexTuple& j, int flip) {
  std::map<int, int> m;
  for (std::size_t i = 0; i < 6; ++i) m[j[i]] += (i % 2 == 0 ? 1 : -1) * flip;
  Signature s;
  for (auto [v, c] : m)
    if (c != 0) s.emplace_back(v, c);
  return s;
}

}  // namespace

double e3star_l2_exact(int N, MatchingMethod method, int cap) {
  if (N > cap) throw std::invalid_argument("e3star_l2_exact: N exceeds Wick oracle cap " + std::to_string(cap));
  std::vector<IndexTuple> tuples;
  enumerate_IN(N, Subset::all(), [&](const IndexTuple& j) { tuples.push_back(j); });
  std::map<Signature, std::vector<std::size_t>> buckets;
  for (std::size_t i = 0; i < tuples.size(); ++i) buckets[signature(tuples[i], 1)].push_back(i);

  const auto count = [&](const std::array<int, 6>& plain, const std::array<int, 6>& conj) {
    return method == MatchingMethod::recursive ? matchings_recursive(plain, conj, 0, 0u)
                                               : matchings_permutation(plain, conj);
  };

  // E|S|^2: g_j conj(g_k). Unconjugated factors j1 j3 j5 k2 k4 k6; conjugated j2 j4 j6 k1 k3 k5.
  // E[S^2]:  g_j g_k.      Unconjugated factors j1 j3 j5 k1 k3 k5; conjugated j2 j4 j6 k2 k4 k6.
  double abs2 = 0.0, sq = 0.0;
  for (const auto& [sig, members] : buckets) {
    for (std::size_t a : members) {
      const IndexTuple& j = tuples[a];
      for (std::size_t b : members) {
        const IndexTuple& k = tuples[b];
        const std::array<int, 6> plain{j[0], j[2], j[4], k[1], k[3], k[5]};
        const std::array<int, 6> conj{j[1], j[3], j[5], k[0], k[2], k[4]};
        abs2 += coefficient(j) * coefficient(k) * static_cast<double>(count(plain, conj));
      }
    }
    Signature neg = sig;
    for (auto& e : neg) e.second = -e.second;
    const auto it = buckets.find(neg);
    if (it == buckets.end()) continue;
    for (std::size_t a : members) {
      const IndexTuple& j = tuples[a];
      for (std::size_t b : it->second) {
        const IndexTuple& k = tuples[b];
        const std::array<int, 6> plain{j[0], j[2], j[4], k[0], k[2], k[4]};
        const std::array<int, 6> conj{j[1], j[3], j[5], k[1], k[3], k[5]};
        sq += coefficient(j) * coefficient(k) * static_cast<double>(count(plain, conj));
      }
    }
  }
  const double im2 = std::max(0.0, 0.5 * (abs2 - sq));
  return e3star_prefactor * std::sqrt(im2);
}

Estimate e3star_l2_mc(const E3StarSpec& spec, int workers) {
  EnsembleSpec es;
  es.N = spec.N;
  es.seed = spec.seed;
  es.count = spec.samples;
  es.R = spec.R;
  es.band = spec.band;
  es.validate();
  auto res = ensemble_map<double>(
      spec.samples,
      [&](std::size_t i) {
        const auto u = sample_field(es, i);
        const double e = e3_drift(u, spec.N);
        const double chi = spec.chi_on ? bump_chi(energy_closed_form(u, 1, Sign::defocusing), spec.R) : 1.0;
        return chi * e * e;
      },
      workers);
  if (!res.failures.empty()) throw std::runtime_error("e3star_l2_mc: " + res.failures.front().message);
  std::vector<double> sq;
  sq.reserve(spec.samples);
  for (auto& v : res.values) sq.push_back(*v);
  return rms_jackknife(sq);
}

}  // namespace mkdvlab
