#pragma once

#include <cstddef>
#include <vector>

#include "csadapt/matrix.hpp"

namespace csadapt {

/// Coefficient vector of length `length` stored as (support, values) with
/// support sorted ascending and unique.
struct SparseVector {
  std::size_t length = 0;
  std::vector<std::size_t> support;
  std::vector<double> values;

  std::size_t sparsity() const noexcept { return support.size(); }
  Vector to_dense() const;

  /// Keeps entries with |v| ≥ threshold (threshold 0 keeps exact nonzeros).
  static SparseVector from_dense(const Vector& dense, double threshold = 0.0);

  /// Throws DegenerateInputError if indices are unsorted, repeated, out of
  /// range, or a value is not finite.
  void validate() const;
};

/// Orthogonal Matching Pursuit against a fixed matrix.
///
/// Columns are normalized once on construction; coefficients are reported
/// for the original (unnormalized) columns.
class OmpSolver {
 public:
  explicit OmpSolver(const DenseMatrix& a);

  struct Trace {
    SparseVector solution;
    /// ‖r‖₂ before the first selection and after each one.
    std::vector<double> residual_norms;
  };

  /// Greedy selection of argmaxⱼ |⟨āⱼ, r⟩| (lowest index on ties), least
  /// squares refit on the support, stop at max_sparsity atoms or
  /// ‖r‖₂ ≤ residual_tol. Throws ConfigError if max_sparsity > M.
  Trace solve_traced(const Vector& y, std::size_t max_sparsity, double residual_tol) const;

  SparseVector solve(const Vector& y, std::size_t max_sparsity, double residual_tol) const {
    return solve_traced(y, max_sparsity, residual_tol).solution;
  }

 private:
  DenseMatrix unit_columns_;
  Vector column_norms_;
};

SparseVector omp(const DenseMatrix& a, const Vector& y, std::size_t max_sparsity, double residual_tol);

/// ADMM settings for basis pursuit.
struct BpConfig {
  double penalty = 1.0;  // ρ
  int max_iterations = 5000;
  double primal_tol = 1e-7;
  double dual_tol = 1e-7;
  /// Over-relaxation factor in (0, 2); 1 is plain ADMM.
  double relaxation = 1.6;
  /// Every this many iterations the support of z is polished by least
  /// squares and tested for ℓ1 optimality (0 disables).
  int certificate_interval = 10;

  void validate() const;
};

/// How a basis pursuit solve ended.
enum class BpStop {
  Residuals,    // primal and dual residuals below tolerance
  Certificate,  // polished support verified optimal by a dual certificate
  MaxIterations,
};

struct BpResult {
  SparseVector solution;
  bool converged = false;
  BpStop stop = BpStop::MaxIterations;
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
};

/// min ‖α‖₁ s.t. Aα = y by (over-relaxed) ADMM on the split α = z:
///   α ← Π(z − u),  α̂ ← ωα + (1 − ω)z,  z ← soft(α̂ + u, 1/ρ),  u ← u + α̂ − z,
/// where Π(v) = v − A⁺(Av − y) projects on the feasible set. Stops when
/// ‖α − z‖₂ ≤ primal_tol and ρ‖z − z_prev‖₂ ≤ dual_tol, or earlier when the
/// least-squares solution α_S on a pruned support S of z is feasible and a
/// dual vector ν with A_Sᵀν = sign(α_S) satisfies ‖A_{S^c}ᵀν‖_∞ < 1, which
/// proves α_S is the ℓ1 minimizer. ν is tried as the minimum-norm solution
/// and as the ADMM subgradient ρu mapped through (Aᵀ)⁺ and corrected onto
/// the support equations. On residual or iteration-limit stops the
/// polished candidate replaces α when it is feasible and has no larger ℓ1
/// norm. Entries below 1e-6 are zeroed in the reported solution.
class BasisPursuitSolver {
 public:
  BasisPursuitSolver(const DenseMatrix& a, BpConfig cfg);

  BpResult solve(const Vector& y) const;

 private:
  struct Polished {
    Vector x;
    bool feasible = false;
    bool certified = false;
  };
  Polished polish(const Vector& z, const Vector& y, const Vector& subgradient) const;

  DenseMatrix a_;
  DenseMatrix a_pinv_;
  BpConfig cfg_;
};

BpResult basis_pursuit(const DenseMatrix& a, const Vector& y, const BpConfig& cfg = {});

inline constexpr double kBpZeroThreshold = 1e-6;
inline constexpr double kSuccessThreshold = 1e-3;

/// ‖Ψα − Ψα̂‖₂ < 1e-3, measured in the signal domain.
bool reconstruction_success(const DenseMatrix& psi, const SparseVector& alpha, const SparseVector& alpha_hat);

/// ‖Ψ(α − α̂)‖₂.
double signal_error(const DenseMatrix& psi, const SparseVector& alpha, const SparseVector& alpha_hat);

}  // namespace csadapt
