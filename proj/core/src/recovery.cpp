#include "csadapt/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "csadapt/errors.hpp"

namespace csadapt {

Vector SparseVector::to_dense() const {
  Vector out = Vector::Zero(static_cast<Eigen::Index>(length));
  for (std::size_t i = 0; i < support.size(); ++i) out(static_cast<Eigen::Index>(support[i])) = values[i];
  return out;
}

SparseVector SparseVector::from_dense(const Vector& dense, double threshold) {
  SparseVector out;
  out.length = static_cast<std::size_t>(dense.size());
  for (Eigen::Index i = 0; i < dense.size(); ++i) {
    const double v = dense(i);
    if (v != 0.0 && std::abs(v) >= threshold) {
      out.support.push_back(static_cast<std::size_t>(i));
      out.values.push_back(v);
    }
  }
  return out;
}

void SparseVector::validate() const {
  if (support.size() != values.size()) throw DegenerateInputError("sparse vector: support and values differ in size");
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (support[i] >= length) {
      throw DegenerateInputError("sparse vector: index " + std::to_string(support[i]) + " outside length " +
                                 std::to_string(length));
    }
    if (i > 0 && support[i] <= support[i - 1]) throw DegenerateInputError("sparse vector: support not strictly increasing");
    if (!std::isfinite(values[i])) throw DegenerateInputError("sparse vector: non-finite value");
  }
}

// ---------------------------------------------------------------------------
// OMP

OmpSolver::OmpSolver(const DenseMatrix& a) {
  require_finite(a, "omp");
  column_norms_ = a.colwise().norm().transpose();
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    if (column_norms_(j) == 0.0) throw DegenerateInputError("omp: column " + std::to_string(j) + " is zero");
  }
  unit_columns_ = a * column_norms_.cwiseInverse().asDiagonal();
}

OmpSolver::Trace OmpSolver::solve_traced(const Vector& y, std::size_t max_sparsity, double residual_tol) const {
  const Eigen::Index m = unit_columns_.rows();
  const Eigen::Index l = unit_columns_.cols();
  if (y.size() != m) {
    throw DimensionError("omp: measurement has length " + std::to_string(y.size()) + ", expected " + std::to_string(m));
  }
  if (max_sparsity > static_cast<std::size_t>(m)) {
    throw ConfigError("omp: max_sparsity " + std::to_string(max_sparsity) + " exceeds the " + std::to_string(m) +
                      " measurements");
  }

  Trace trace;
  std::vector<Eigen::Index> chosen;
  std::vector<bool> used(static_cast<std::size_t>(l), false);
  Vector r = y;
  Vector coef;
  trace.residual_norms.push_back(r.norm());

  while (chosen.size() < max_sparsity && trace.residual_norms.back() > residual_tol) {
    const Vector corr = unit_columns_.transpose() * r;
    Eigen::Index pick = -1;
    double best = 0.0;
    for (Eigen::Index j = 0; j < l; ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      const double c = std::abs(corr(j));
      if (c > best) {
        best = c;
        pick = j;
      }
    }
    if (pick < 0) break;  // residual orthogonal to every remaining atom
    chosen.push_back(pick);
    used[static_cast<std::size_t>(pick)] = true;

    DenseMatrix sub(m, static_cast<Eigen::Index>(chosen.size()));
    for (std::size_t s = 0; s < chosen.size(); ++s) sub.col(static_cast<Eigen::Index>(s)) = unit_columns_.col(chosen[s]);
    coef = sub.completeOrthogonalDecomposition().solve(y);
    r = y - sub * coef;
    trace.residual_norms.push_back(r.norm());
  }

  std::vector<std::size_t> order(chosen.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return chosen[a] < chosen[b]; });
  trace.solution.length = static_cast<std::size_t>(l);
  for (std::size_t s : order) {
    const Eigen::Index j = chosen[s];
    trace.solution.support.push_back(static_cast<std::size_t>(j));
    trace.solution.values.push_back(coef(static_cast<Eigen::Index>(s)) / column_norms_(j));
  }
  return trace;
}

SparseVector omp(const DenseMatrix& a, const Vector& y, std::size_t max_sparsity, double residual_tol) {
  return OmpSolver(a).solve(y, max_sparsity, residual_tol);
}

// ---------------------------------------------------------------------------
// Basis pursuit

void BpConfig::validate() const {
  if (!(penalty > 0.0) || !std::isfinite(penalty)) throw ConfigError("bp: penalty must be positive");
  if (max_iterations < 1) throw ConfigError("bp: max_iterations must be >= 1");
  if (!(primal_tol > 0.0) || !(dual_tol > 0.0)) throw ConfigError("bp: tolerances must be positive");
  if (!(relaxation > 0.0 && relaxation < 2.0)) throw ConfigError("bp: relaxation must lie in (0, 2)");
  if (certificate_interval < 0) throw ConfigError("bp: certificate_interval must be >= 0");
}

BasisPursuitSolver::BasisPursuitSolver(const DenseMatrix& a, BpConfig cfg) : a_(a), cfg_(cfg) {
  cfg_.validate();
  require_finite(a_, "basis_pursuit");
  a_pinv_ = pseudo_inverse(a_);
}

namespace {

constexpr double kFeasibilityTol = 1e-10;
constexpr double kCertificateMargin = 1e-9;
// Supports tried by polish: entries of z above these fractions of max|z|.
constexpr double kPruneLevels[] = {0.0, 1e-4, 1e-3, 1e-2, 1e-1};

}  // namespace

BasisPursuitSolver::Polished BasisPursuitSolver::polish(const Vector& z, const Vector& y, const Vector& subgradient) const {
  Polished best;
  const double y_norm = y.norm();
  const double z_max = z.lpNorm<Eigen::Infinity>();
  if (z_max == 0.0) {
    best.x = Vector::Zero(a_.cols());
    best.feasible = y_norm == 0.0;
    best.certified = best.feasible;
    return best;
  }

  std::vector<Eigen::Index> previous;
  for (double level : kPruneLevels) {
    std::vector<Eigen::Index> support;
    for (Eigen::Index i = 0; i < z.size(); ++i)
      if (std::abs(z(i)) > level * z_max) support.push_back(i);
    if (support.empty() || support == previous || support.size() > static_cast<std::size_t>(a_.rows())) continue;
    previous = support;

    DenseMatrix sub(a_.rows(), static_cast<Eigen::Index>(support.size()));
    for (std::size_t s = 0; s < support.size(); ++s) sub.col(static_cast<Eigen::Index>(s)) = a_.col(support[s]);
    const auto cod = sub.completeOrthogonalDecomposition();
    const Vector xs = cod.solve(y);
    if ((sub * xs - y).norm() > kFeasibilityTol * std::max(1.0, y_norm)) continue;

    Polished cand;
    cand.x = Vector::Zero(a_.cols());
    for (std::size_t s = 0; s < support.size(); ++s) cand.x(support[s]) = xs(static_cast<Eigen::Index>(s));
    cand.feasible = true;

    // The refit must keep the signs of z, and the minimum-norm ν with
    // A_Sᵀν = sign(x_S) must keep every off-support correlation inside (−1, 1).
    bool signs_ok = cod.rank() == sub.cols();
    Vector signs(static_cast<Eigen::Index>(support.size()));
    for (Eigen::Index s = 0; signs_ok && s < signs.size(); ++s) {
      const double v = xs(s);
      signs_ok = v != 0.0 && (v > 0.0) == (z(support[static_cast<std::size_t>(s)]) > 0.0);
      signs(s) = v > 0.0 ? 1.0 : -1.0;
    }
    if (signs_ok) {
      // Two candidate duals: the minimum-norm solution, and the ADMM
      // subgradient estimate pulled back to dual space and corrected onto the
      // support equations.
      const auto sub_t = sub.transpose().completeOrthogonalDecomposition();
      const Vector nu_min = sub_t.solve(signs);
      const Vector nu_admm = a_pinv_.transpose() * subgradient;
      const Vector nu_fix = nu_admm + sub_t.solve(signs - sub.transpose() * nu_admm);
      for (const Vector* nu : {&nu_min, &nu_fix}) {
        if ((sub.transpose() * *nu - signs).lpNorm<Eigen::Infinity>() > 1e-9) continue;
        Vector corr = a_.transpose() * *nu;
        for (Eigen::Index i : support) corr(i) = 0.0;
        if (corr.lpNorm<Eigen::Infinity>() < 1.0 - kCertificateMargin) {
          cand.certified = true;
          break;
        }
      }
    }
    if (cand.certified) return cand;
    if (!best.feasible || cand.x.lpNorm<1>() < best.x.lpNorm<1>()) best = std::move(cand);
  }
  return best;
}

BpResult BasisPursuitSolver::solve(const Vector& y) const {
  if (y.size() != a_.rows()) {
    throw DimensionError("basis_pursuit: measurement has length " + std::to_string(y.size()) + ", expected " +
                         std::to_string(a_.rows()));
  }
  const Eigen::Index l = a_.cols();
  const double omega = cfg_.relaxation;
  const double rho = cfg_.penalty;

  Vector x = a_pinv_ * y;
  Vector z = x;
  Vector u = Vector::Zero(l);
  Vector v(l);
  Vector x_hat(l);
  Vector z_prev(l);

  BpResult result;
  auto finish = [&](const Vector& estimate) {
    result.solution = SparseVector::from_dense(estimate, kBpZeroThreshold);
    return result;
  };

  for (int it = 1; it <= cfg_.max_iterations; ++it) {
    v = z - u;
    x = v - a_pinv_ * (a_ * v - y);
    x_hat = omega * x + (1.0 - omega) * z;
    z_prev = z;
    const double kappa = 1.0 / rho;
    z = (x_hat + u).unaryExpr([kappa](double w) { return std::copysign(std::max(std::abs(w) - kappa, 0.0), w); });
    u += x_hat - z;

    result.iterations = it;
    result.primal_residual = (x - z).norm();
    result.dual_residual = rho * (z - z_prev).norm();
    if (result.primal_residual <= cfg_.primal_tol && result.dual_residual <= cfg_.dual_tol) {
      result.converged = true;
      result.stop = BpStop::Residuals;
      break;
    }
    if (cfg_.certificate_interval > 0 && it % cfg_.certificate_interval == 0) {
      Polished p = polish(z, y, rho * u);
      if (p.certified) {
        result.converged = true;
        result.stop = BpStop::Certificate;
        return finish(p.x);
      }
    }
  }

  if (cfg_.certificate_interval > 0) {
    Polished p = polish(z, y, rho * u);
    if (p.feasible && p.x.lpNorm<1>() <= x.lpNorm<1>()) {
      if (p.certified) {
        result.converged = true;
        result.stop = BpStop::Certificate;
      }
      return finish(p.x);
    }
  }
  return finish(x);
}

BpResult basis_pursuit(const DenseMatrix& a, const Vector& y, const BpConfig& cfg) {
  return BasisPursuitSolver(a, cfg).solve(y);
}

// ---------------------------------------------------------------------------

double signal_error(const DenseMatrix& psi, const SparseVector& alpha, const SparseVector& alpha_hat) {
  const auto l = static_cast<std::size_t>(psi.cols());
  if (alpha.length != l || alpha_hat.length != l) {
    throw DimensionError("reconstruction_success: coefficient lengths " + std::to_string(alpha.length) + " and " +
                         std::to_string(alpha_hat.length) + " do not match dictionary width " + std::to_string(l));
  }
  return (psi * (alpha.to_dense() - alpha_hat.to_dense())).norm();
}

bool reconstruction_success(const DenseMatrix& psi, const SparseVector& alpha, const SparseVector& alpha_hat) {
  return signal_error(psi, alpha, alpha_hat) < kSuccessThreshold;
}

}  // namespace csadapt
