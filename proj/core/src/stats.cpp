#include "csadapt/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "csadapt/errors.hpp"

namespace csadapt {

double binomial_standard_error(std::size_t successes, std::size_t trials) {
  if (trials == 0) throw ConfigError("binomial_standard_error: zero trials");
  const double f = static_cast<double>(successes) / static_cast<double>(trials);
  return std::sqrt(f * (1.0 - f) / static_cast<double>(trials));
}

RankTestResult mann_whitney_u(std::span<const double> x, std::span<const double> y) {
  if (x.empty() || y.empty()) throw ConfigError("mann_whitney_u: both samples must be non-empty");
  const std::size_t n1 = x.size();
  const std::size_t n2 = y.size();
  const std::size_t n = n1 + n2;

  std::vector<std::pair<double, bool>> pooled;  // (value, from x)
  pooled.reserve(n);
  for (double v : x) pooled.emplace_back(v, true);
  for (double v : y) pooled.emplace_back(v, false);
  std::sort(pooled.begin(), pooled.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  double rank_sum_x = 0.0;
  double tie_term = 0.0;  // Σ (t³ − t) over tie groups
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && pooled[j].first == pooled[i].first) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
    for (std::size_t k = i; k < j; ++k)
      if (pooled[k].second) rank_sum_x += avg_rank;
    const auto t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }

  RankTestResult r;
  const double d1 = static_cast<double>(n1);
  const double d2 = static_cast<double>(n2);
  const double dn = static_cast<double>(n);
  r.u_statistic = rank_sum_x - d1 * (d1 + 1.0) / 2.0;
  const double mean = d1 * d2 / 2.0;
  const double var = d1 * d2 / 12.0 * ((dn + 1.0) - tie_term / (dn * (dn - 1.0)));
  if (!(var > 0.0)) return r;  // every value tied
  const double dev = std::max(std::abs(r.u_statistic - mean) - 0.5, 0.0);
  r.z = std::copysign(dev / std::sqrt(var), r.u_statistic - mean);
  r.p_value = std::erfc(std::abs(r.z) / std::sqrt(2.0));
  return r;
}

}  // namespace csadapt
