#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mkdvlab {

/// A Monte Carlo or exact value. stderr_ is 0 and exact is set for closed-form outputs.
struct Estimate {
  double value = 0.0;
  double stderr_ = 0.0;
  std::size_t samples = 0;
  bool exact = false;
};

Estimate mean_estimate(std::span<const double> x);

/// sqrt(mean(x)) with a leave-one-out jackknife error.
Estimate rms_jackknife(std::span<const double> squares);

/// Self-normalized sum w f / sum w with a delta-method standard error.
/// Throws std::domain_error if every weight is zero.
Estimate self_normalized(std::span<const double> w, std::span<const double> f);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double ci_low = 0.0;   // 95% normal interval
  double ci_high = 0.0;
};

/// Least squares y = a + b x with known per-point standard deviations sigma (weights 1/sigma^2).
/// With sigma empty the fit is unweighted and the error comes from the residuals.
LineFit fit_line(std::span<const double> x, std::span<const double> y, std::span<const double> sigma = {});

struct TrendTest {
  int statistic = 0;     // Mann-Kendall S
  double p_value = 1.0;  // exact one-sided p for a decreasing trend
};

/// Exact Mann-Kendall test against the alternative "decreasing" for 2 to 10 points. Ties score
/// zero against a null distribution of distinct ranks.
TrendTest mann_kendall_decreasing(std::span<const double> y);

}  // namespace mkdvlab
