#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "csadapt/coherence.hpp"
#include "csadapt/dictionary.hpp"
#include "csadapt/errors.hpp"
#include "csadapt/optimizers.hpp"
#include "csadapt/recovery.hpp"

namespace csadapt {

enum class MatrixVariant { Rand, MuA, Cross };
enum class Algorithm { Omp, Bp };

std::string_view to_string(MatrixVariant v);
std::string_view to_string(Algorithm a);
MatrixVariant parse_matrix_variant(std::string_view text);
Algorithm parse_algorithm(std::string_view text);

/// Full description of a Monte Carlo recovery study.
struct ExperimentConfig {
  Eigen::Index m = 30;
  Eigen::Index n = 200;
  Eigen::Index l = 400;
  DictionaryKind dictionary = IdentityDct{};
  std::vector<MatrixVariant> matrix_variants{MatrixVariant::Rand, MatrixVariant::MuA, MatrixVariant::Cross};
  std::vector<Algorithm> algorithms{Algorithm::Omp, Algorithm::Bp};
  std::vector<std::size_t> sparsity_levels{2, 4, 6, 8, 10, 12};
  std::size_t trials_per_level = 2000;
  RngSeed master_seed{1};
  GramShrinkConfig mu_a;
  CrossCoherenceConfig cross;
  BpConfig bp;
  double omp_residual_tol = 1e-7;

  /// Throws ConfigError describing the first violated constraint.
  void validate() const;
};

/// JSON mirror of ExperimentConfig; unknown keys are rejected.
ExperimentConfig experiment_config_from_json(std::string_view json_text);
std::string experiment_config_to_json(const ExperimentConfig& cfg);

/// Coefficients of a k-sparse vector: support uniform among the C(l, k)
/// subsets (partial Fisher-Yates), values i.i.d. standard normal.
SparseVector generate_sparse_vector(std::size_t l, std::size_t k, RngSeed seed);

struct PreparedMatrix {
  MatrixVariant variant = MatrixVariant::Rand;
  DenseMatrix phi;
  double mu_a = 0.0;      // μ(ΦΨ)
  double mu_cross = 0.0;  // μ(Φ, Ψ)
  std::optional<OptimizerReport> report;
};

struct PreparedMatrices {
  DenseMatrix psi;
  RngSeed dictionary_seed;
  RngSeed phi_seed;
  std::vector<PreparedMatrix> variants;

  const PreparedMatrix& get(MatrixVariant v) const;
};

/// Seeds used by prepare_matrices, derived from the master seed.
RngSeed dictionary_seed(RngSeed master);
RngSeed measurement_seed(RngSeed master);

/// Draws Ψ and one Gaussian Φ_rand; every optimized variant starts from
/// that same Φ_rand.
PreparedMatrices prepare_matrices(const ExperimentConfig& cfg);

/// Seed of a single trial; replaying it reproduces that trial alone.
RngSeed trial_seed(RngSeed master, MatrixVariant v, Algorithm a, std::size_t sparsity, std::size_t trial);

struct CurvePoint {
  MatrixVariant variant = MatrixVariant::Rand;
  Algorithm algorithm = Algorithm::Omp;
  std::size_t sparsity = 0;
  std::size_t trials = 0;
  std::size_t successes = 0;
  std::size_t nonconverged = 0;  // BP runs that hit max_iterations

  double frequency() const noexcept;
  double standard_error() const noexcept;
};

struct ExperimentResult {
  ExperimentConfig config;
  PreparedMatrices matrices;
  std::vector<CurvePoint> curves;  // variant-major, then algorithm, then sparsity

  const CurvePoint& at(MatrixVariant v, Algorithm a, std::size_t sparsity) const;
};

/// Raised when a solver throws inside a trial; carries the coordinates
/// needed to replay it.
class TrialError : public Error {
 public:
  TrialError(MatrixVariant v, Algorithm a, std::size_t sparsity, std::size_t trial, RngSeed seed,
             const std::string& cause);

  MatrixVariant variant;
  Algorithm algorithm;
  std::size_t sparsity;
  std::size_t trial;
  RngSeed seed;
};

/// Number of worker threads; 0 selects std::thread::hardware_concurrency().
struct RunOptions {
  unsigned threads = 0;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts = {});

/// Runs the trials against matrices prepared earlier (e.g. shared between runs).
ExperimentResult run_experiment(const ExperimentConfig& cfg, PreparedMatrices matrices, const RunOptions& opts = {});

/// Outcome of one trial: whether recovery succeeded and whether BP converged.
struct TrialOutcome {
  bool success = false;
  bool converged = true;
};

/// Single trial replay with the seed from trial_seed.
TrialOutcome run_trial(const PreparedMatrices& matrices, MatrixVariant v, Algorithm a, std::size_t sparsity,
                       RngSeed seed, const ExperimentConfig& cfg);

/// curves.csv header and rows.
std::string format_curves_csv(const ExperimentResult& r);
std::vector<CurvePoint> parse_curves_csv(std::string_view text);
std::string format_provenance_json(const ExperimentResult& r);

struct EmitOptions {
  bool distributions = false;  // also write dist_<variant>_A.csv / dist_<variant>_reduced.csv
};

/// Writes curves.csv and provenance.json (and distributions on request)
/// into `dir`, creating it if needed. Each file is written atomically.
void emit_results(const ExperimentResult& r, const std::filesystem::path& dir, const EmitOptions& opts = {});

/// `pair_label,value` CSV.
std::string format_distribution_csv(const CoherenceDistribution& d);
/// `bin_center,count` CSV.
std::string format_histogram_csv(const std::vector<HistogramBin>& bins);

}  // namespace csadapt
