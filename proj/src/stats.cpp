#include "mkdvlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mkdvlab {

Estimate mean_estimate(std::span<const double> x) {
  Estimate e;
  e.samples = x.size();
  if (x.empty()) return e;
  const double n = static_cast<double>(x.size());
  e.value = std::accumulate(x.begin(), x.end(), 0.0) / n;
  if (x.size() > 1) {
    double ss = 0.0;
    for (double v : x) ss += (v - e.value) * (v - e.value);
    e.stderr_ = std::sqrt(ss / (n - 1.0) / n);
  }
  return e;
}

Estimate rms_jackknife(std::span<const double> sq) {
  Estimate e;
  e.samples = sq.size();
  if (sq.empty()) return e;
  const double n = static_cast<double>(sq.size());
  const double total = std::accumulate(sq.begin(), sq.end(), 0.0);
  e.value = std::sqrt(total / n);
  if (sq.size() < 2) return e;
  std::vector<double> loo(sq.size());
  for (std::size_t i = 0; i < sq.size(); ++i) loo[i] = std::sqrt(std::max(0.0, (total - sq[i]) / (n - 1.0)));
  const double mean = std::accumulate(loo.begin(), loo.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : loo) ss += (v - mean) * (v - mean);
  e.stderr_ = std::sqrt((n - 1.0) / n * ss);
  return e;
}

Estimate self_normalized(std::span<const double> w, std::span<const double> f) {
  if (w.size() != f.size()) throw std::invalid_argument("self_normalized: size mismatch");
  double sw = 0.0, swf = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    sw += w[i];
    swf += w[i] * f[i];
  }
  if (!(sw > 0.0)) throw std::domain_error("self_normalized: all weights are zero");
  Estimate e;
  e.samples = w.size();
  e.value = swf / sw;
  double ss = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) ss += w[i] * w[i] * (f[i] - e.value) * (f[i] - e.value);
  e.stderr_ = std::sqrt(ss) / sw;
  return e;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y, std::span<const double> sigma) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n || (!sigma.empty() && sigma.size() != n))
    throw std::invalid_argument("fit_line: need at least two points of matching size");
  std::vector<double> w(n, 1.0);
  if (!sigma.empty())
    for (std::size_t i = 0; i < n; ++i) {
      if (!(sigma[i] > 0.0)) throw std::invalid_argument("fit_line: sigma must be positive");
      w[i] = 1.0 / (sigma[i] * sigma[i]);
    }
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
    sxx += w[i] * x[i] * x[i];
    sxy += w[i] * x[i] * y[i];
  }
  const double det = sw * sxx - sx * sx;
  if (det == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
  LineFit f;
  f.slope = (sw * sxy - sx * sy) / det;
  f.intercept = (sy - f.slope * sx) / sw;
  if (!sigma.empty()) {
    f.slope_stderr = std::sqrt(sw / det);
  } else if (n > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - f.intercept - f.slope * x[i];
      rss += r * r;
    }
    f.slope_stderr = std::sqrt(rss / static_cast<double>(n - 2) * sw / det);
  }
  f.ci_low = f.slope - 1.96 * f.slope_stderr;
  f.ci_high = f.slope + 1.96 * f.slope_stderr;
  return f;
}

TrendTest mann_kendall_decreasing(std::span<const double> y) {
  const int n = static_cast<int>(y.size());
  if (n < 2) throw std::invalid_argument("mann_kendall: need at least two points");
  if (n > 10) throw std::invalid_argument("mann_kendall: exact distribution limited to 10 points");
  const auto score = [](std::span<const double> v) {
    int s = 0;
    for (std::size_t i = 0; i < v.size(); ++i)
      for (std::size_t j = i + 1; j < v.size(); ++j) s += (v[j] > v[i]) - (v[j] < v[i]);
    return s;
  };
  TrendTest t;
  t.statistic = score(y);
  // Null distribution over all orderings of ranks.
  std::vector<double> ranks(static_cast<std::size_t>(n));
  std::iota(ranks.begin(), ranks.end(), 0.0);
  long total = 0, at_most = 0;
  do {
    ++total;
    if (score(ranks) <= t.statistic) ++at_most;
  } while (std::next_permutation(ranks.begin(), ranks.end()));
  t.p_value = static_cast<double>(at_most) / static_cast<double>(total);
  return t;
}

}  // namespace mkdvlab
