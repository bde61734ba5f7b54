#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "csadapt/coherence.hpp"
#include "csadapt/errors.hpp"
#include "csadapt/optimizers.hpp"

namespace csadapt {

namespace {

// Quantile (lower order statistic) of the strictly upper-triangular |G| entries.
double off_diagonal_quantile(const DenseMatrix& g, double q) {
  const Eigen::Index l = g.cols();
  std::vector<double> mags;
  mags.reserve(static_cast<std::size_t>(l * (l - 1) / 2));
  for (Eigen::Index j = 1; j < l; ++j)
    for (Eigen::Index i = 0; i < j; ++i) mags.push_back(std::abs(g(i, j)));
  const auto k = static_cast<std::size_t>(std::floor(q * static_cast<double>(mags.size() - 1)));
  std::nth_element(mags.begin(), mags.begin() + static_cast<std::ptrdiff_t>(k), mags.end());
  return mags[k];
}

void shrink_off_diagonal(DenseMatrix& g, double t, double gamma) {
  const Eigen::Index l = g.cols();
  for (Eigen::Index j = 0; j < l; ++j) {
    for (Eigen::Index i = 0; i < l; ++i) {
      if (i == j) continue;
      const double v = g(i, j);
      const double mag = std::abs(v);
      if (mag >= t) {
        g(i, j) = gamma * v;
      } else if (mag >= gamma * t) {
        g(i, j) = std::copysign(gamma * t, v);
      }
    }
  }
}

}  // namespace

std::string_view to_string(ThresholdRule rule) {
  switch (rule) {
    case ThresholdRule::Fixed: return "fixed";
    case ThresholdRule::Quantile: return "quantile";
    case ThresholdRule::RelativeToMax: return "relative";
  }
  return "unknown";
}

ThresholdRule parse_threshold_rule(std::string_view text) {
  for (ThresholdRule r : {ThresholdRule::Fixed, ThresholdRule::Quantile, ThresholdRule::RelativeToMax})
    if (to_string(r) == text) return r;
  throw ConfigError("unknown threshold rule '" + std::string(text) + "' (expected fixed, quantile or relative)");
}

void GramShrinkConfig::validate() const {
  if (iterations < 1) throw ConfigError("mu_a: iterations must be >= 1");
  if (!(shrink_factor > 0.0 && shrink_factor < 1.0)) throw ConfigError("mu_a: shrink factor must lie in (0, 1)");
  switch (threshold_rule) {
    case ThresholdRule::Fixed:
      if (!(shrink_threshold > 0.0 && shrink_threshold <= 1.0)) throw ConfigError("mu_a: shrink threshold must lie in (0, 1]");
      break;
    case ThresholdRule::Quantile:
      if (!(threshold_quantile >= 0.0 && threshold_quantile < 1.0)) throw ConfigError("mu_a: threshold quantile must lie in [0, 1)");
      break;
    case ThresholdRule::RelativeToMax:
      if (!(threshold_ratio > 0.0 && threshold_ratio <= 1.0)) throw ConfigError("mu_a: threshold ratio must lie in (0, 1]");
      break;
  }
}

OptimizationResult optimize_mu_a(const DenseMatrix& phi0, const DenseMatrix& psi, const GramShrinkConfig& cfg) {
  cfg.validate();
  const Eigen::Index m = phi0.rows();
  const Eigen::Index n = phi0.cols();
  const Eigen::Index l = psi.cols();
  if (psi.rows() != n) {
    throw DimensionError("optimize_mu_a: phi is " + std::to_string(m) + "x" + std::to_string(n) + " but psi is " +
                         std::to_string(psi.rows()) + "x" + std::to_string(l));
  }
  if (!(m <= n && n <= l)) {
    throw DimensionError("optimize_mu_a: requires M <= N <= L, got M=" + std::to_string(m) + " N=" +
                         std::to_string(n) + " L=" + std::to_string(l));
  }
  require_finite(phi0, "optimize_mu_a");
  require_finite(psi, "optimize_mu_a");

  const DenseMatrix psi_pinv = pseudo_inverse(psi);

  OptimizationResult best{phi0, {}};
  OptimizerReport& report = best.report;
  report.objective.reserve(static_cast<std::size_t>(cfg.iterations) + 1);
  report.initial_coherence = mutual_coherence(phi0 * psi);
  report.objective.push_back(report.initial_coherence);
  report.final_coherence = report.initial_coherence;

  DenseMatrix phi = phi0;
  double current = report.initial_coherence;
  for (int it = 1; it <= cfg.iterations; ++it) {
    const DenseMatrix a = normalize_columns(phi * psi);
    DenseMatrix g = a.transpose() * a;
    double t = cfg.shrink_threshold;
    if (cfg.threshold_rule == ThresholdRule::Quantile) t = off_diagonal_quantile(g, cfg.threshold_quantile);
    if (cfg.threshold_rule == ThresholdRule::RelativeToMax) t = cfg.threshold_ratio * current;
    shrink_off_diagonal(g, t, cfg.shrink_factor);

    const SymmetricEigen eig = symmetric_eigen(g);
    const Vector root = eig.values.head(m).cwiseMax(0.0).cwiseSqrt();
    const DenseMatrix b = root.asDiagonal() * eig.vectors.leftCols(m).transpose();
    phi = b * psi_pinv;

    const DenseMatrix a_next = phi * psi;
    if (!a_next.allFinite() || (a_next.colwise().norm().array() == 0.0).any()) break;
    const double mu = mutual_coherence(a_next);
    report.objective.push_back(mu);
    current = mu;
    if (mu < report.final_coherence) {
      report.final_coherence = mu;
      report.best_iteration = static_cast<std::size_t>(it);
      best.phi = phi;
    }
  }
  return best;
}

}  // namespace csadapt
