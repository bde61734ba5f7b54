#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "csadapt/matrix.hpp"
#include "csadapt/rng.hpp"

namespace csadapt {

/// How the shrink threshold t is chosen at each Gram-shrinkage iteration.
enum class ThresholdRule {
  Fixed,          // t = shrink_threshold
  Quantile,       // t = threshold_quantile quantile of the current off-diagonal |G|
  RelativeToMax,  // t = threshold_ratio · μ(A) of the current iterate
};

/// Parameters of the Gram-shrinkage optimizer for μ(A).
struct GramShrinkConfig {
  int iterations = 1000;
  ThresholdRule threshold_rule = ThresholdRule::RelativeToMax;
  double shrink_threshold = 0.4;
  double threshold_quantile = 0.8;
  double threshold_ratio = 0.95;
  /// Shrink factor γ in (0, 1).
  double shrink_factor = 0.8;
  /// Seeds the Gaussian initialization when the caller does not supply Φ₀.
  RngSeed seed{0};

  void validate() const;
};

std::string_view to_string(ThresholdRule rule);
ThresholdRule parse_threshold_rule(std::string_view text);

/// Parameters of the projected descent on the smoothed cross coherence.
struct CrossCoherenceConfig {
  int iterations = 2000;
  /// Even exponent p of J(Φ) = Σᵢⱼ ⟨φᵢ, ψ̄ⱼ⟩ᵖ.
  int smoothing_exponent = 8;
  /// Initial step η, applied to the row-normalized tangent gradient.
  double step_size = 0.5;
  /// Multiplicative decay of η per iteration, in (0, 1].
  double step_decay = 0.995;
  RngSeed seed{0};

  void validate() const;
};

/// Convergence telemetry. objective[0] belongs to the initial matrix,
/// objective[i] to the iterate after i updates.
struct OptimizerReport {
  std::vector<double> objective;
  std::size_t best_iteration = 0;
  double initial_coherence = 0.0;
  /// objective[best_iteration]; the coherence of the returned matrix.
  double final_coherence = 0.0;
  /// Set when Ψ arrived with non-unit columns and was normalized internally.
  bool psi_renormalized = false;
};

struct OptimizationResult {
  DenseMatrix phi;
  OptimizerReport report;
};

/// Reduces μ(ΦΨ) by iterated Gram shrinkage and rank-M projection.
///
/// Per iteration: A ← normalize_columns(ΦΨ); G ← AᵀA; off-diagonal entries
/// are shrunk (|g| ≥ t: g ← γg; γt ≤ |g| < t: g ← γt·sign(g); else kept);
/// G is projected to rank M through its M largest eigenpairs (negative
/// eigenvalues clamped to 0) and factored G ≈ BᵀB with
/// B = diag(√λ₁..√λ_M)·V_Mᵀ; finally Φ ← BΨ⁺ (minimum-norm least squares).
///
/// Requires phi0 M×N, psi N×L with M ≤ N ≤ L. Returns the best iterate, so
/// report.final_coherence ≤ report.initial_coherence always.
OptimizationResult optimize_mu_a(const DenseMatrix& phi0, const DenseMatrix& psi, const GramShrinkConfig& cfg);

/// Reduces μ(Φ, Ψ) by descent on the smoothed maximum
/// J(Φ) = Σᵢⱼ ⟨φᵢ, ψ̄ⱼ⟩ᵖ with rows kept on the unit sphere.
///
/// Rows of phi0 are normalized first. Each iteration moves every row against
/// its gradient projected on the sphere's tangent space, with length η (the
/// gradient direction is normalized), renormalizes the row and decays η.
/// Returns the best iterate by μ(Φ, Ψ).
OptimizationResult optimize_mu_cross(const DenseMatrix& phi0, const DenseMatrix& psi, const CrossCoherenceConfig& cfg);

/// J(Φ) for unit-norm Ψ columns (no normalization is applied here).
double smoothed_cross_objective(const DenseMatrix& phi, const DenseMatrix& psi_unit, int exponent);

/// ∇J(Φ) = p · (C^{∘(p−1)}) Ψ̄ᵀ with C = ΦΨ̄; same shape as Φ.
DenseMatrix smoothed_cross_gradient(const DenseMatrix& phi, const DenseMatrix& psi_unit, int exponent);

/// Normalizes every row of Φ; throws DegenerateInputError on a zero row.
DenseMatrix normalize_rows(const DenseMatrix& m);

}  // namespace csadapt
