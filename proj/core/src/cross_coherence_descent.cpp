#include <cmath>
#include <string>

#include "csadapt/coherence.hpp"
#include "csadapt/errors.hpp"
#include "csadapt/optimizers.hpp"

namespace csadapt {

namespace {

constexpr double kUnitTolerance = 1e-10;

}  // namespace

void CrossCoherenceConfig::validate() const {
  if (iterations < 1) throw ConfigError("cross: iterations must be >= 1");
  if (smoothing_exponent < 2 || smoothing_exponent % 2 != 0) {
    throw ConfigError("cross: smoothing exponent must be an even integer >= 2");
  }
  if (!(step_size > 0.0) || !std::isfinite(step_size)) throw ConfigError("cross: step size must be positive");
  if (!(step_decay > 0.0 && step_decay <= 1.0)) throw ConfigError("cross: step decay must lie in (0, 1]");
}

DenseMatrix normalize_rows(const DenseMatrix& m) {
  DenseMatrix out = m;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double norm = out.row(i).norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw DegenerateInputError("normalize_rows: row " + std::to_string(i) + " is zero or not finite");
    }
    out.row(i) /= norm;
  }
  return out;
}

double smoothed_cross_objective(const DenseMatrix& phi, const DenseMatrix& psi_unit, int exponent) {
  return (phi * psi_unit).array().pow(exponent).sum();
}

DenseMatrix smoothed_cross_gradient(const DenseMatrix& phi, const DenseMatrix& psi_unit, int exponent) {
  const DenseMatrix c = phi * psi_unit;
  const DenseMatrix weights = static_cast<double>(exponent) * c.array().pow(exponent - 1).matrix();
  return weights * psi_unit.transpose();
}

OptimizationResult optimize_mu_cross(const DenseMatrix& phi0, const DenseMatrix& psi, const CrossCoherenceConfig& cfg) {
  cfg.validate();
  if (phi0.cols() != psi.rows()) {
    throw DimensionError("optimize_mu_cross: phi is " + std::to_string(phi0.rows()) + "x" +
                         std::to_string(phi0.cols()) + " but psi is " + std::to_string(psi.rows()) + "x" +
                         std::to_string(psi.cols()));
  }
  require_finite(phi0, "optimize_mu_cross");
  require_finite(psi, "optimize_mu_cross");

  const Eigen::RowVectorXd psi_norms = psi.colwise().norm();
  const bool renormalized = ((psi_norms.array() - 1.0).abs() > kUnitTolerance).any();
  const DenseMatrix psi_unit = renormalized ? normalize_columns(psi) : psi;

  DenseMatrix phi = normalize_rows(phi0);
  OptimizationResult best{phi, {}};
  OptimizerReport& report = best.report;
  report.psi_renormalized = renormalized;
  report.objective.reserve(static_cast<std::size_t>(cfg.iterations) + 1);
  report.initial_coherence = cross_coherence(phi, psi);
  report.objective.push_back(report.initial_coherence);
  report.final_coherence = report.initial_coherence;

  double step = cfg.step_size;
  for (int it = 1; it <= cfg.iterations; ++it) {
    const DenseMatrix grad = smoothed_cross_gradient(phi, psi_unit, cfg.smoothing_exponent);
    for (Eigen::Index i = 0; i < phi.rows(); ++i) {
      Eigen::RowVectorXd tangent = grad.row(i) - grad.row(i).dot(phi.row(i)) * phi.row(i);
      const double tnorm = tangent.norm();
      if (tnorm > 0.0 && std::isfinite(tnorm)) phi.row(i) -= (step / tnorm) * tangent;
      phi.row(i).normalize();
    }
    step *= cfg.step_decay;

    const double mu = cross_coherence(phi, psi);
    report.objective.push_back(mu);
    if (mu < report.final_coherence) {
      report.final_coherence = mu;
      report.best_iteration = static_cast<std::size_t>(it);
      best.phi = phi;
    }
  }
  return best;
}

}  // namespace csadapt
