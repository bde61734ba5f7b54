#include "csadapt_cli/cli.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>
#include <ostream>

#include "csadapt/coherence.hpp"
#include "csadapt/dictionary.hpp"
#include "csadapt/errors.hpp"
#include "csadapt/harness.hpp"
#include "csadapt/matrix_io.hpp"
#include "csadapt/optimizers.hpp"
#include "csadapt/recovery.hpp"

namespace csadapt::cli {

namespace {

using json = nlohmann::json;

struct OptimizeArgs {
  std::string objective;
  std::string dict = "idct";
  Eigen::Index m = 30, n = 200, l = 400;
  std::uint64_t seed = 1;
  std::optional<int> iters;
  std::optional<std::string> threshold_rule;
  std::optional<double> shrink_threshold, threshold_quantile, threshold_ratio, shrink_factor;
  std::optional<int> exponent;
  std::optional<double> step_size, step_decay;
  std::string out;
  std::string report;
  std::string dict_out;
};

struct RecoverArgs {
  std::string matrix, dict, y, algo;
  std::optional<std::size_t> k;
  std::string truth, out, meta;
  double omp_tol = 1e-7;
};

struct ExperimentArgs {
  std::string config;
  std::string out = "results";
  bool distributions = false;
};

struct CoherenceArgs {
  std::string matrix, dict;
  bool reduced = false;
  std::string out, hist;
  double bin_width = kDefaultHistogramBinWidth;
};

// Thrown for conditions that are not library errors but still map to exit 2.
struct ComputationFailure : Error {
  using Error::Error;
};

void emit(std::ostream& out, const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    write_file_atomic(path, text);
  }
}

std::string vector_csv(const Vector& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += format_real(v(i)) + "\n";
  return s;
}

json report_json(const OptimizerReport& r) {
  return {{"objective", r.objective},
          {"best_iteration", r.best_iteration},
          {"initial_coherence", r.initial_coherence},
          {"final_coherence", r.final_coherence},
          {"psi_renormalized", r.psi_renormalized}};
}

int run_optimize(const OptimizeArgs& a, std::ostream& out) {
  const DictionaryKind kind = parse_dictionary_kind(a.dict);
  const RngSeed master{a.seed};
  const DenseMatrix psi = build_dictionary(kind, a.n, a.l, dictionary_seed(master));
  const DenseMatrix phi0 = gaussian_matrix(a.m, a.n, measurement_seed(master));

  OptimizationResult res;
  if (a.objective == "mua") {
    GramShrinkConfig cfg;
    cfg.seed = master;
    if (a.iters) cfg.iterations = *a.iters;
    if (a.threshold_rule) cfg.threshold_rule = parse_threshold_rule(*a.threshold_rule);
    if (a.shrink_threshold) cfg.shrink_threshold = *a.shrink_threshold;
    if (a.threshold_quantile) cfg.threshold_quantile = *a.threshold_quantile;
    if (a.threshold_ratio) cfg.threshold_ratio = *a.threshold_ratio;
    if (a.shrink_factor) cfg.shrink_factor = *a.shrink_factor;
    res = optimize_mu_a(phi0, psi, cfg);
  } else {
    CrossCoherenceConfig cfg;
    cfg.seed = master;
    if (a.iters) cfg.iterations = *a.iters;
    if (a.exponent) cfg.smoothing_exponent = *a.exponent;
    if (a.step_size) cfg.step_size = *a.step_size;
    if (a.step_decay) cfg.step_decay = *a.step_decay;
    res = optimize_mu_cross(phi0, psi, cfg);
  }

  write_matrix_csv(a.out, res.phi);
  if (!a.dict_out.empty()) write_matrix_csv(a.dict_out, psi);
  json rep = report_json(res.report);
  rep["criterion"] = a.objective;
  if (!a.report.empty()) write_file_atomic(a.report, rep.dump(2) + "\n");

  json summary{{"criterion", a.objective},
               {"initial_coherence", res.report.initial_coherence},
               {"final_coherence", res.report.final_coherence},
               {"best_iteration", res.report.best_iteration},
               {"mu_a", mutual_coherence(res.phi * psi)},
               {"mu_cross", cross_coherence(res.phi, psi)}};
  out << summary.dump() << "\n";
  return kExitOk;
}

int run_recover(const RecoverArgs& a, std::ostream& out) {
  const Algorithm algo = parse_algorithm(a.algo);
  const DenseMatrix phi = read_matrix_csv(a.matrix);
  const DenseMatrix psi = read_matrix_csv(a.dict);
  const Vector y = read_vector_csv(a.y);
  const DenseMatrix sensing = matmul(phi, psi);
  if (y.size() != sensing.rows()) {
    throw DimensionError("recover: y has length " + std::to_string(y.size()) + " but the matrix has " +
                         std::to_string(sensing.rows()) + " rows");
  }

  SparseVector alpha_hat;
  json meta{{"algorithm", a.algo}};
  bool converged = true;
  if (algo == Algorithm::Omp) {
    const std::size_t k = a.k.value_or(static_cast<std::size_t>(sensing.rows()));
    alpha_hat = omp(sensing, y, k, a.omp_tol);
    meta["max_sparsity"] = k;
  } else {
    const BpResult r = basis_pursuit(sensing, y);
    alpha_hat = r.solution;
    converged = r.converged;
    meta["converged"] = r.converged;
    meta["iterations"] = r.iterations;
  }
  const Vector dense = alpha_hat.to_dense();
  meta["sparsity"] = alpha_hat.sparsity();
  meta["support"] = alpha_hat.support;
  meta["residual_norm"] = (sensing * dense - y).norm();
  if (!a.truth.empty()) {
    const Vector truth = read_vector_csv(a.truth);
    if (truth.size() != psi.cols()) {
      throw DimensionError("recover: truth has length " + std::to_string(truth.size()) + ", expected " +
                           std::to_string(psi.cols()));
    }
    const SparseVector t = SparseVector::from_dense(truth);
    meta["signal_error"] = signal_error(psi, t, alpha_hat);
    meta["success"] = reconstruction_success(psi, t, alpha_hat);
  }

  emit(out, a.out, vector_csv(dense));
  emit(out, a.meta, meta.dump() + "\n");
  if (!converged) throw ComputationFailure("bp did not converge within the iteration limit");
  return kExitOk;
}

int run_experiment_cmd(const ExperimentArgs& a, unsigned threads, std::ostream& out) {
  const ExperimentConfig cfg = experiment_config_from_json(read_text_file(a.config));
  const ExperimentResult r = run_experiment(cfg, RunOptions{threads});
  emit_results(r, a.out, EmitOptions{a.distributions});
  out << format_curves_csv(r);
  return kExitOk;
}

int run_coherence(const CoherenceArgs& a, std::ostream& out) {
  const DenseMatrix phi = read_matrix_csv(a.matrix);
  const DenseMatrix psi = read_matrix_csv(a.dict);
  const CoherenceDistribution d =
      a.reduced ? reduced_coherence_distribution(phi, psi) : coherence_distribution_of_A(matmul(phi, psi));
  if (!a.hist.empty()) write_file_atomic(a.hist, format_histogram_csv(histogram(d, a.bin_width)));
  emit(out, a.out, format_distribution_csv(d));
  if (!a.out.empty() && a.out != "-") {
    json summary{{"pairs", d.size()}, {"max", d.max()}, {"reduced", a.reduced}};
    out << summary.dump() << "\n";
  }
  return kExitOk;
}

void report_error(std::ostream& err, const std::string& kind, const std::string& message, json extra = json::object()) {
  extra["error"] = kind;
  extra["message"] = message;
  err << extra.dump() << "\n";
}

}  // namespace

std::string version_string() { return std::string("csadapt ") + CSADAPT_VERSION + " (" + CSADAPT_GIT_HASH + ")"; }

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adapt compressed-sensing measurement matrices to a dictionary and benchmark sparse recovery."};
  app.name("csadapt");
  app.set_help_all_flag("--help-all", "Print help for every subcommand");
  app.set_version_flag("--version", version_string());
  app.require_subcommand(1);

  unsigned threads = 0;
  app.add_option("--threads", threads, "Worker threads for experiments (0 = machine parallelism)");

  OptimizeArgs oa;
  auto* opt = app.add_subcommand("optimize", "Optimize a Gaussian measurement matrix for one coherence criterion");
  opt->add_option("--objective", oa.objective, "Criterion to minimize")->required()->check(CLI::IsMember({"mua", "cross"}));
  opt->add_option("--dict", oa.dict, "Dictionary: idct, gauss or file:PATH")->capture_default_str();
  opt->add_option("--m", oa.m, "Measurements (rows of phi)")->capture_default_str();
  opt->add_option("--n", oa.n, "Signal dimension")->capture_default_str();
  opt->add_option("--l", oa.l, "Dictionary atoms")->capture_default_str();
  opt->add_option("--seed", oa.seed, "Master seed for the dictionary and the initial matrix")->capture_default_str();
  opt->add_option("--iters", oa.iters, "Iterations (default 1000 for mua, 2000 for cross)");
  opt->add_option("--threshold-rule", oa.threshold_rule, "mua: fixed, quantile or relative");
  opt->add_option("--shrink-threshold", oa.shrink_threshold, "mua: threshold t for the fixed rule");
  opt->add_option("--threshold-quantile", oa.threshold_quantile, "mua: quantile for the quantile rule");
  opt->add_option("--threshold-ratio", oa.threshold_ratio, "mua: t as a fraction of the current mu(A)");
  opt->add_option("--shrink-factor", oa.shrink_factor, "mua: shrink factor gamma in (0,1)");
  opt->add_option("--exponent", oa.exponent, "cross: even smoothing exponent p");
  opt->add_option("--step-size", oa.step_size, "cross: initial step");
  opt->add_option("--step-decay", oa.step_decay, "cross: step decay per iteration");
  opt->add_option("--out", oa.out, "Output CSV for the optimized matrix")->required();
  opt->add_option("--report", oa.report, "Output JSON with the per-iteration objective");
  opt->add_option("--dict-out", oa.dict_out, "Also write the dictionary as CSV");

  RecoverArgs ra;
  auto* rec = app.add_subcommand("recover", "Recover a sparse coefficient vector from measurements");
  rec->add_option("--matrix", ra.matrix, "Measurement matrix phi (CSV)")->required();
  rec->add_option("--dict", ra.dict, "Dictionary psi (CSV)")->required();
  rec->add_option("--y", ra.y, "Measurements (CSV row or column)")->required();
  rec->add_option("--algo", ra.algo, "Solver")->required()->check(CLI::IsMember({"omp", "bp"}));
  rec->add_option("--k", ra.k, "OMP: number of atoms (default: number of measurements)");
  rec->add_option("--omp-tol", ra.omp_tol, "OMP: residual tolerance")->capture_default_str();
  rec->add_option("--truth", ra.truth, "True coefficients (CSV); adds success to the metadata");
  rec->add_option("--out", ra.out, "Output CSV for the recovered coefficients (default: stdout)");
  rec->add_option("--meta", ra.meta, "Output JSON metadata (default: stdout)");

  ExperimentArgs ea;
  auto* exp = app.add_subcommand("experiment", "Run a Monte Carlo recovery experiment");
  exp->add_option("--config", ea.config, "JSON experiment configuration")->required();
  exp->add_option("--out", ea.out, "Output directory")->capture_default_str();
  exp->add_flag("--distributions", ea.distributions, "Also write coherence distributions per matrix");

  CoherenceArgs ca;
  auto* coh = app.add_subcommand("coherence", "Coherence distribution of A = phi psi or of [phi^T, psi]");
  coh->add_option("--matrix", ca.matrix, "Measurement matrix phi (CSV)")->required();
  coh->add_option("--dict", ca.dict, "Dictionary psi (CSV)")->required();
  coh->add_flag("--reduced", ca.reduced, "Pairs of [phi^T, psi] without psi/psi pairs instead of A");
  coh->add_option("--out", ca.out, "Output CSV pair_label,value (default: stdout)");
  coh->add_option("--hist", ca.hist, "Output CSV bin_center,count");
  coh->add_option("--bin-width", ca.bin_width, "Histogram bin width")->capture_default_str();

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& s : args) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    report_error(err, "usage", e.what());
    return kExitUsage;
  }

  try {
    if (*opt) return run_optimize(oa, out);
    if (*rec) return run_recover(ra, out);
    if (*exp) return run_experiment_cmd(ea, threads, out);
    return run_coherence(ca, out);
  } catch (const ConfigError& e) {
    report_error(err, "config", e.what());
    return kExitUsage;
  } catch (const IoError& e) {
    report_error(err, "io", e.what());
    return kExitUsage;
  } catch (const DimensionError& e) {
    report_error(err, "dimension", e.what());
  } catch (const DegenerateInputError& e) {
    report_error(err, "degenerate", e.what());
  } catch (const ConvergenceError& e) {
    report_error(err, "convergence", e.what());
  } catch (const TrialError& e) {
    report_error(err, "trial", e.what(),
                 {{"variant", std::string(to_string(e.variant))},
                  {"algorithm", std::string(to_string(e.algorithm))},
                  {"sparsity", e.sparsity},
                  {"trial", e.trial},
                  {"seed", e.seed.value}});
  } catch (const ComputationFailure& e) {
    report_error(err, "convergence", e.what());
  } catch (const std::exception& e) {
    report_error(err, "internal", e.what());
  }
  return kExitComputation;
}

}  // namespace csadapt::cli
