#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "mkdvlab/spectral_field.hpp"
#include "mkdvlab/stats.hpp"

namespace mkdvlab {

/// (j1, ..., j6) paired with the factors u, conj(u), u, conj(u), u, conj(u).
using IndexTuple = std::array<int, 6>;

/// j1 - j2 + j3 - j4 + j5 - j6
int total_frequency(const IndexTuple& j);
/// j1 - j2 + j3
int output_frequency(const IndexTuple& j);
/// j3 / prod <j_i>
double coefficient(const IndexTuple& j);

/// Positions are 1-based. Each pair joins an odd (unconjugated) position with an even one.
struct PairingClass {
  int r = 0;
  std::vector<std::pair<int, int>> pairs;
};

/// Maximal pairing: r = sum over values of min(#odd positions, #even positions) holding it.
/// Within a value, odd and even positions are matched in increasing order; pairs are listed
/// lexicographically.
PairingClass classify_pairing(const IndexTuple& j);

enum class SubsetKind { all, zero, one_pair, tilde, hat };

/// one_pair(k, l): j_k = j_l and r = 1.
/// tilde(3, l), l in {4, 6}: j3 = j_l and exactly five distinct values.
/// hat(3, l): j3 = j_l and some third position shares that value.
struct Subset {
  SubsetKind kind = SubsetKind::all;
  int k = 0, l = 0;

  static Subset all() { return {}; }
  static Subset zero() { return {SubsetKind::zero}; }
  static Subset one_pair(int k, int l);
  static Subset tilde(int l) { return {SubsetKind::tilde, 3, l}; }
  static Subset hat(int l) { return {SubsetKind::hat, 3, l}; }

  bool contains(const IndexTuple& j) const;
  std::string name() const;
};

inline constexpr int enumeration_cap = 64;

/// Visits I_N = {|j_i| <= N, L(j) = 0, |P(j)| > N} restricted to the subset, in lexicographic
/// order of (j1, ..., j5). j6 is eliminated through L = 0; ties of the subset fix one more
/// index where possible. Rejects N > cap.
void enumerate_IN(int N, const Subset& subset, const std::function<void(const IndexTuple&)>& visit,
                  int cap = enumeration_cap);
std::size_t count_IN(int N, const Subset& subset, int cap = enumeration_cap);

/// The four one-pair subsets whose tie lies within {1,2,3} or {4,5,6} with opposite signatures.
std::vector<Subset> same_triplet_subsets();

/// g_{j1} conj(g_{j2}) g_{j3} conj(g_{j4}) g_{j5} conj(g_{j6}); g indexed by j + N.
cplx gaussian_product(const IndexTuple& j, std::span<const cplx> g, int N);

/// sum over the subset of a(j) Im g_j.
double im_sum(int N, const Subset& subset, std::span<const cplx> g);

/// The tuple whose Gaussian product is the conjugate of j's, with equal a and P:
/// (j6, j5, j, j, j2, j1) for j3 = j4 and (j4, j5, j, j1, j2, j) for j3 = j6.
IndexTuple tilde_partner(const IndexTuple& j, int l);

struct CancellationResult {
  double residual = 0.0;  // |sum over tilde(3,l) of a Im g|
  double scale = 0.0;     // sum of |a g| over the same tuples
  std::size_t tuples = 0;
};
CancellationResult tilde_cancellation(int N, int l, std::span<const cplx> g);

enum class LemmaSum { zero_pairing, cross_14, cross_25, hat, log_kernel };
std::string to_string(LemmaSum l);
LemmaSum parse_lemma(const std::string& text);

/// The bounding sums, evaluated in factorized form (exact). With S = sum_{|j|<=N} <j>^-2 and
/// T = sum_{|j|<N/3} <j>^-2:
///   zero_pairing: sum over j1,j2,j4,j5,j6, max(|j4|,|j5|,|j6|) >= N/3 of prod <j>^-2 = S^2 (S^3 - T^3)
///   cross_14:     sum over j2,j5,j6 of (sum_j <j>^-2 <j2>^-1 <j5>^-1 <j6>^-1 [max(|j|,|j5|,|j6|) >= N/3])^2
///   cross_25:     same shape with (j1, j4, j6)
///   hat:          sum over j1, j2, j4, j5, j6 of prod <j>^-2, counted when max(|j4|,|j5|,|j6|) >= N/3
///                 or min(|j1|,|j2|) >= N/3
///   log_kernel:   sum_{|j|<=N} 1 / (<j> <N-j>)
double lemma_sum(LemmaSum lemma, int N);
/// value * N, or value * N / log N for log_kernel.
double lemma_scaled(LemmaSum lemma, int N);

/// E*_{3,N} = (6 / pi^2) Im sum_{I_N} a(j) g_j for c_j = g_j / (sqrt(2 pi) <j>).
inline constexpr double e3star_prefactor = 6.0 / (M_PI * M_PI);

/// Exact sqrt(E|E*_{3,N}|^2) with chi = 1, by Wick expansion of E|S|^2 and E[S^2].
enum class MatchingMethod { recursive, permutation };
double e3star_l2_exact(int N, MatchingMethod method = MatchingMethod::recursive, int cap = 3);

struct E3StarSpec {
  int N = 8;
  double R = 4.0;
  std::size_t samples = 1000;
  std::uint64_t seed = 1;
  bool chi_on = true;
  int band = -1;  // restrict the ensemble to |j| <= band
};
/// sqrt(E[chi_R(E_1) E*^2]) with jackknife error.
Estimate e3star_l2_mc(const E3StarSpec& spec, int workers = 1);

}  // namespace mkdvlab
