#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "csadapt/matrix.hpp"

namespace csadapt {

/// Origin of a coherence pair.
enum class PairLabel {
  PhiPhi,  // two rows of Φ
  PhiPsi,  // a row of Φ against a column of Ψ
  PsiPsi,  // two columns of Ψ
  AA,      // two columns of A = ΦΨ
};

std::string_view to_string(PairLabel label);
PairLabel parse_pair_label(std::string_view text);

/// Multiset of absolute normalized inner products, one label per value.
struct CoherenceDistribution {
  std::vector<double> values;
  std::vector<PairLabel> labels;  // same length as values

  std::size_t size() const noexcept { return values.size(); }
  std::size_t count(PairLabel label) const noexcept;

  /// Largest value overall, 0 for an empty distribution.
  double max() const noexcept;
  /// Largest value among pairs carrying `label`, 0 if there are none.
  double max(PairLabel label) const noexcept;

  /// Empirical quantile (linear interpolation between order statistics), q in [0, 1].
  double quantile(double q) const;
};

/// |⟨x, y⟩| / (‖x‖₂ ‖y‖₂) with the inner product and both norms accumulated
/// left to right in index order. Every coherence in this library is computed
/// through this kernel, so maxima over distributions agree bit for bit with
/// the scalar coherences. Norms are passed in precomputed.
double pair_coherence(const double* x, const double* y, Eigen::Index length, double norm_x, double norm_y) noexcept;

/// √(Σ xᵢ²) accumulated in index order.
double sequential_norm(const double* x, Eigen::Index length) noexcept;

/// μ(A) = max_{i≠j} |⟨aᵢ, aⱼ⟩| / (‖aᵢ‖ ‖aⱼ‖). Requires ≥ 2 columns, none zero.
double mutual_coherence(const DenseMatrix& a);

/// μ(Φ, Ψ) = max_{i,j} |⟨φᵢ, ψⱼ⟩| / (‖φᵢ‖ ‖ψⱼ‖) over rows φᵢ of Φ and columns ψⱼ of Ψ.
double cross_coherence(const DenseMatrix& phi, const DenseMatrix& psi);

/// All L(L−1)/2 off-diagonal normalized |Gram| entries of A, labelled AA,
/// ordered (0,1), (0,2), ..., (1,2), ...
CoherenceDistribution coherence_distribution_of_A(const DenseMatrix& a);

/// Pairs of columns of [Φᵀ | Ψ] except Ψ/Ψ pairs: M(M−1)/2 PhiPhi values
/// followed by M·L PhiPsi values (row-major over (i, j)).
CoherenceDistribution reduced_coherence_distribution(const DenseMatrix& phi, const DenseMatrix& psi);

struct HistogramBin {
  double center = 0.0;
  std::size_t count = 0;
};

/// ceil(1 / bin_width) equal bins covering [0, 1]; bin b holds values in
/// [b·w, (b+1)·w), the last bin also takes everything ≥ its lower edge
/// (including the 1 + 1e-12 rounding slack).
std::vector<HistogramBin> histogram(const CoherenceDistribution& d, double bin_width);

inline constexpr double kDefaultHistogramBinWidth = 0.01;

/// √((l − m) / (m (l − 1))); lower bound on μ of any m×l matrix, l > m ≥ 1.
double welch_bound(Eigen::Index m, Eigen::Index l);

}  // namespace csadapt
