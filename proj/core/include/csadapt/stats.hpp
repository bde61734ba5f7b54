#pragma once

#include <cstddef>
#include <span>

namespace csadapt {

/// √(f(1 − f) / trials) with f = successes / trials.
double binomial_standard_error(std::size_t successes, std::size_t trials);

struct RankTestResult {
  double u_statistic = 0.0;  // U of the first sample
  double z = 0.0;            // continuity-corrected normal score
  double p_value = 1.0;      // two-sided
};

/// Two-sided Wilcoxon-Mann-Whitney rank-sum test, normal approximation with
/// tie-corrected variance and continuity correction. Both samples must be non-empty.
RankTestResult mann_whitney_u(std::span<const double> x, std::span<const double> y);

}  // namespace csadapt
