#include "csadapt/harness.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "csadapt/coherence.hpp"
#include "csadapt/matrix_io.hpp"
#include "csadapt/stats.hpp"

namespace csadapt {

using nlohmann::json;

namespace {

// Domain-separation tags for derive_seed.
constexpr std::uint64_t kTagDictionary = 0x64696374696f6e61ULL;   // "dictiona"
constexpr std::uint64_t kTagMeasurement = 0x6d65617375726531ULL;  // "measure1"
constexpr std::uint64_t kTagTrial = 0x747269616c736565ULL;        // "trialsee"

constexpr std::size_t kTrialChunk = 8;

std::string coordinates(MatrixVariant v, Algorithm a, std::size_t k, std::size_t t) {
  std::ostringstream ss;
  ss << "variant=" << to_string(v) << " algorithm=" << to_string(a) << " sparsity=" << k << " trial=" << t;
  return ss.str();
}

// Per-variant solvers built once and shared read-only by all workers.
struct VariantSolvers {
  MatrixVariant variant;
  DenseMatrix a;
  std::optional<OmpSolver> omp;
  std::optional<BasisPursuitSolver> bp;
};

std::vector<VariantSolvers> build_solvers(const PreparedMatrices& pm, const ExperimentConfig& cfg) {
  std::vector<VariantSolvers> out;
  const bool want_omp = std::ranges::find(cfg.algorithms, Algorithm::Omp) != cfg.algorithms.end();
  const bool want_bp = std::ranges::find(cfg.algorithms, Algorithm::Bp) != cfg.algorithms.end();
  for (MatrixVariant v : cfg.matrix_variants) {
    VariantSolvers s{v, pm.get(v).phi * pm.psi, std::nullopt, std::nullopt};
    if (want_omp) s.omp.emplace(s.a);
    if (want_bp) s.bp.emplace(s.a, cfg.bp);
    out.push_back(std::move(s));
  }
  return out;
}

TrialOutcome trial_with(const VariantSolvers& s, const DenseMatrix& psi, Algorithm algo, std::size_t k, RngSeed seed,
                        const ExperimentConfig& cfg) {
  const SparseVector alpha = generate_sparse_vector(static_cast<std::size_t>(psi.cols()), k, seed);
  const Vector y = s.a * alpha.to_dense();
  TrialOutcome out;
  if (algo == Algorithm::Omp) {
    const SparseVector est = s.omp->solve(y, k, cfg.omp_residual_tol);
    out.success = reconstruction_success(psi, alpha, est);
  } else {
    const BpResult res = s.bp->solve(y);
    out.converged = res.converged;
    out.success = reconstruction_success(psi, alpha, res.solution);
  }
  return out;
}

void reject_unknown_keys(const json& j, std::initializer_list<const char*> known, const std::string& where) {
  for (const auto& [key, _] : j.items()) {
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; })) {
      throw ConfigError("unknown key '" + key + "' in " + where);
    }
  }
}

template <class T>
void read_if(const json& j, const char* key, T& dst) {
  if (j.contains(key)) dst = j.at(key).get<T>();
}

json optimizer_json(const OptimizerReport& r) {
  return json{{"initial_coherence", r.initial_coherence},
              {"final_coherence", r.final_coherence},
              {"best_iteration", r.best_iteration},
              {"iterations_recorded", r.objective.size()},
              {"psi_renormalized", r.psi_renormalized}};
}

}  // namespace

std::string_view to_string(MatrixVariant v) {
  switch (v) {
    case MatrixVariant::Rand: return "rand";
    case MatrixVariant::MuA: return "mua";
    case MatrixVariant::Cross: return "cross";
  }
  return "unknown";
}

std::string_view to_string(Algorithm a) { return a == Algorithm::Omp ? "omp" : "bp"; }

MatrixVariant parse_matrix_variant(std::string_view text) {
  for (MatrixVariant v : {MatrixVariant::Rand, MatrixVariant::MuA, MatrixVariant::Cross})
    if (to_string(v) == text) return v;
  throw ConfigError("unknown matrix variant '" + std::string(text) + "' (expected rand, mua or cross)");
}

Algorithm parse_algorithm(std::string_view text) {
  for (Algorithm a : {Algorithm::Omp, Algorithm::Bp})
    if (to_string(a) == text) return a;
  throw ConfigError("unknown algorithm '" + std::string(text) + "' (expected omp or bp)");
}

void ExperimentConfig::validate() const {
  if (m < 1 || n < 1 || l < 1) throw ConfigError("experiment: m, n and l must be >= 1");
  if (std::holds_alternative<IdentityDct>(dictionary) && l != 2 * n) {
    throw ConfigError("experiment: the idct dictionary requires l = 2n");
  }
  if (matrix_variants.empty()) throw ConfigError("experiment: no matrix variants requested");
  if (algorithms.empty()) throw ConfigError("experiment: no algorithms requested");
  if (std::set(matrix_variants.begin(), matrix_variants.end()).size() != matrix_variants.size()) {
    throw ConfigError("experiment: duplicate matrix variant");
  }
  if (std::set(algorithms.begin(), algorithms.end()).size() != algorithms.size()) {
    throw ConfigError("experiment: duplicate algorithm");
  }
  if (sparsity_levels.empty()) throw ConfigError("experiment: no sparsity levels");
  for (std::size_t k : sparsity_levels) {
    if (k > static_cast<std::size_t>(m) || k > static_cast<std::size_t>(l)) {
      throw ConfigError("experiment: sparsity level " + std::to_string(k) + " exceeds m or l");
    }
  }
  if (trials_per_level < 1) throw ConfigError("experiment: trials_per_level must be >= 1");
  if (std::ranges::find(matrix_variants, MatrixVariant::MuA) != matrix_variants.end()) {
    if (!(m <= n && n <= l)) throw ConfigError("experiment: the mua optimizer requires m <= n <= l");
    mu_a.validate();
  }
  if (std::ranges::find(matrix_variants, MatrixVariant::Cross) != matrix_variants.end()) cross.validate();
  if (std::ranges::find(algorithms, Algorithm::Bp) != algorithms.end()) bp.validate();
  if (!(omp_residual_tol >= 0.0)) throw ConfigError("experiment: omp_residual_tol must be >= 0");
}

ExperimentConfig experiment_config_from_json(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("experiment config: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("experiment config: top level must be an object");
  ExperimentConfig cfg;
  try {
    reject_unknown_keys(j,
                              {"m", "n", "l", "dictionary", "matrix_variants", "algorithms", "sparsity_levels",
                               "trials_per_level", "master_seed", "mu_a", "cross", "bp", "omp_residual_tol"},
                              "experiment config");
    read_if(j, "m", cfg.m);
    read_if(j, "n", cfg.n);
    read_if(j, "l", cfg.l);
    if (j.contains("dictionary")) cfg.dictionary = parse_dictionary_kind(j.at("dictionary").get<std::string>());
    if (j.contains("matrix_variants")) {
      cfg.matrix_variants.clear();
      for (const auto& v : j.at("matrix_variants")) cfg.matrix_variants.push_back(parse_matrix_variant(v.get<std::string>()));
    }
    if (j.contains("algorithms")) {
      cfg.algorithms.clear();
      for (const auto& a : j.at("algorithms")) cfg.algorithms.push_back(parse_algorithm(a.get<std::string>()));
    }
    read_if(j, "sparsity_levels", cfg.sparsity_levels);
    read_if(j, "trials_per_level", cfg.trials_per_level);
    if (j.contains("master_seed")) cfg.master_seed.value = j.at("master_seed").get<std::uint64_t>();
    read_if(j, "omp_residual_tol", cfg.omp_residual_tol);
    if (j.contains("mu_a")) {
      const json& o = j.at("mu_a");
      reject_unknown_keys(o,
                          {"iterations", "threshold_rule", "shrink_threshold", "threshold_quantile", "threshold_ratio",
                           "shrink_factor", "seed"},
                          "mu_a");
      read_if(o, "iterations", cfg.mu_a.iterations);
      if (o.contains("threshold_rule")) cfg.mu_a.threshold_rule = parse_threshold_rule(o.at("threshold_rule").get<std::string>());
      read_if(o, "shrink_threshold", cfg.mu_a.shrink_threshold);
      read_if(o, "threshold_ratio", cfg.mu_a.threshold_ratio);
      read_if(o, "threshold_quantile", cfg.mu_a.threshold_quantile);
      read_if(o, "shrink_factor", cfg.mu_a.shrink_factor);
      if (o.contains("seed")) cfg.mu_a.seed.value = o.at("seed").get<std::uint64_t>();
    }
    if (j.contains("cross")) {
      const json& o = j.at("cross");
      reject_unknown_keys(o, {"iterations", "smoothing_exponent", "step_size", "step_decay", "seed"}, "cross");
      read_if(o, "iterations", cfg.cross.iterations);
      read_if(o, "smoothing_exponent", cfg.cross.smoothing_exponent);
      read_if(o, "step_size", cfg.cross.step_size);
      read_if(o, "step_decay", cfg.cross.step_decay);
      if (o.contains("seed")) cfg.cross.seed.value = o.at("seed").get<std::uint64_t>();
    }
    if (j.contains("bp")) {
      const json& o = j.at("bp");
      reject_unknown_keys(o, {"penalty", "max_iterations", "primal_tol", "dual_tol", "relaxation", "certificate_interval"},
                          "bp");
      read_if(o, "penalty", cfg.bp.penalty);
      read_if(o, "max_iterations", cfg.bp.max_iterations);
      read_if(o, "primal_tol", cfg.bp.primal_tol);
      read_if(o, "dual_tol", cfg.bp.dual_tol);
      read_if(o, "relaxation", cfg.bp.relaxation);
      read_if(o, "certificate_interval", cfg.bp.certificate_interval);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("experiment config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

std::string experiment_config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["m"] = cfg.m;
  j["n"] = cfg.n;
  j["l"] = cfg.l;
  j["dictionary"] = to_string(cfg.dictionary);
  j["matrix_variants"] = json::array();
  for (auto v : cfg.matrix_variants) j["matrix_variants"].push_back(std::string(to_string(v)));
  j["algorithms"] = json::array();
  for (auto a : cfg.algorithms) j["algorithms"].push_back(std::string(to_string(a)));
  j["sparsity_levels"] = cfg.sparsity_levels;
  j["trials_per_level"] = cfg.trials_per_level;
  j["master_seed"] = cfg.master_seed.value;
  j["omp_residual_tol"] = cfg.omp_residual_tol;
  j["mu_a"] = {{"iterations", cfg.mu_a.iterations},
               {"threshold_rule", std::string(to_string(cfg.mu_a.threshold_rule))},
               {"shrink_threshold", cfg.mu_a.shrink_threshold},
               {"threshold_quantile", cfg.mu_a.threshold_quantile},
               {"threshold_ratio", cfg.mu_a.threshold_ratio},
               {"shrink_factor", cfg.mu_a.shrink_factor},
               {"seed", cfg.mu_a.seed.value}};
  j["cross"] = {{"iterations", cfg.cross.iterations},
                {"smoothing_exponent", cfg.cross.smoothing_exponent},
                {"step_size", cfg.cross.step_size},
                {"step_decay", cfg.cross.step_decay},
                {"seed", cfg.cross.seed.value}};
  j["bp"] = {{"penalty", cfg.bp.penalty},
             {"max_iterations", cfg.bp.max_iterations},
             {"primal_tol", cfg.bp.primal_tol},
             {"dual_tol", cfg.bp.dual_tol},
             {"relaxation", cfg.bp.relaxation},
             {"certificate_interval", cfg.bp.certificate_interval}};
  return j.dump(2);
}

SparseVector generate_sparse_vector(std::size_t l, std::size_t k, RngSeed seed) {
  if (k > l) throw ConfigError("generate_sparse_vector: sparsity " + std::to_string(k) + " exceeds length " + std::to_string(l));
  Rng rng(seed);
  std::vector<std::size_t> idx(l);
  for (std::size_t i = 0; i < l; ++i) idx[i] = i;
  for (std::size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + rng.uniform_below(l - i)]);
  std::vector<std::pair<std::size_t, double>> entries(k);
  for (std::size_t i = 0; i < k; ++i) entries[i] = {idx[i], rng.normal()};
  std::sort(entries.begin(), entries.end());

  SparseVector out;
  out.length = l;
  for (const auto& [i, v] : entries) {
    out.support.push_back(i);
    out.values.push_back(v);
  }
  return out;
}

const PreparedMatrix& PreparedMatrices::get(MatrixVariant v) const {
  for (const auto& p : variants)
    if (p.variant == v) return p;
  throw ConfigError("matrix variant '" + std::string(to_string(v)) + "' was not prepared");
}

RngSeed dictionary_seed(RngSeed master) { return derive_seed({master.value, kTagDictionary}); }
RngSeed measurement_seed(RngSeed master) { return derive_seed({master.value, kTagMeasurement}); }

PreparedMatrices prepare_matrices(const ExperimentConfig& cfg) {
  cfg.validate();
  PreparedMatrices pm;
  pm.dictionary_seed = dictionary_seed(cfg.master_seed);
  pm.phi_seed = measurement_seed(cfg.master_seed);
  pm.psi = build_dictionary(cfg.dictionary, cfg.n, cfg.l, pm.dictionary_seed);
  const DenseMatrix phi_rand = gaussian_matrix(cfg.m, cfg.n, pm.phi_seed);

  for (MatrixVariant v : cfg.matrix_variants) {
    PreparedMatrix p;
    p.variant = v;
    try {
      switch (v) {
        case MatrixVariant::Rand:
          p.phi = phi_rand;
          break;
        case MatrixVariant::MuA: {
          auto res = optimize_mu_a(phi_rand, pm.psi, cfg.mu_a);
          p.phi = std::move(res.phi);
          p.report = std::move(res.report);
          break;
        }
        case MatrixVariant::Cross: {
          auto res = optimize_mu_cross(phi_rand, pm.psi, cfg.cross);
          p.phi = std::move(res.phi);
          p.report = std::move(res.report);
          break;
        }
      }
    } catch (const Error& e) {
      throw Error("preparing variant '" + std::string(to_string(v)) + "': " + e.what());
    }
    p.mu_a = mutual_coherence(p.phi * pm.psi);
    p.mu_cross = cross_coherence(p.phi, pm.psi);
    pm.variants.push_back(std::move(p));
  }
  return pm;
}

RngSeed trial_seed(RngSeed master, MatrixVariant v, Algorithm a, std::size_t sparsity, std::size_t trial) {
  return derive_seed({master.value, kTagTrial, static_cast<std::uint64_t>(v), static_cast<std::uint64_t>(a),
                      static_cast<std::uint64_t>(sparsity), static_cast<std::uint64_t>(trial)});
}

double CurvePoint::frequency() const noexcept {
  return trials == 0 ? 0.0 : static_cast<double>(successes) / static_cast<double>(trials);
}

double CurvePoint::standard_error() const noexcept {
  return trials == 0 ? 0.0 : binomial_standard_error(successes, trials);
}

const CurvePoint& ExperimentResult::at(MatrixVariant v, Algorithm a, std::size_t sparsity) const {
  for (const auto& c : curves)
    if (c.variant == v && c.algorithm == a && c.sparsity == sparsity) return c;
  throw ConfigError("no curve point for " + coordinates(v, a, sparsity, 0));
}

TrialError::TrialError(MatrixVariant v, Algorithm a, std::size_t k, std::size_t t, RngSeed s, const std::string& cause)
    : Error("trial failed (" + coordinates(v, a, k, t) + " seed=" + std::to_string(s.value) + "): " + cause),
      variant(v),
      algorithm(a),
      sparsity(k),
      trial(t),
      seed(s) {}

TrialOutcome run_trial(const PreparedMatrices& matrices, MatrixVariant v, Algorithm a, std::size_t sparsity,
                       RngSeed seed, const ExperimentConfig& cfg) {
  ExperimentConfig single = cfg;
  single.matrix_variants = {v};
  single.algorithms = {a};
  const auto solvers = build_solvers(matrices, single);
  return trial_with(solvers.front(), matrices.psi, a, sparsity, seed, cfg);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
  return run_experiment(cfg, prepare_matrices(cfg), opts);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, PreparedMatrices matrices, const RunOptions& opts) {
  cfg.validate();
  const auto solvers = build_solvers(matrices, cfg);

  struct Cell {
    std::size_t variant_index;
    Algorithm algorithm;
    std::size_t sparsity;
  };
  std::vector<Cell> cells;
  for (std::size_t vi = 0; vi < cfg.matrix_variants.size(); ++vi)
    for (Algorithm a : cfg.algorithms)
      for (std::size_t k : cfg.sparsity_levels) cells.push_back({vi, a, k});

  const std::size_t trials = cfg.trials_per_level;
  const std::size_t total = cells.size() * trials;
  std::vector<TrialOutcome> outcomes(total);
  std::vector<std::string> failures(total);
  std::atomic<bool> failed{false};
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    while (!failed.load(std::memory_order_relaxed)) {
      const std::size_t begin = next.fetch_add(kTrialChunk);
      if (begin >= total) return;
      const std::size_t end = std::min(begin + kTrialChunk, total);
      for (std::size_t w = begin; w < end; ++w) {
        const Cell& c = cells[w / trials];
        const std::size_t t = w % trials;
        const MatrixVariant v = cfg.matrix_variants[c.variant_index];
        try {
          outcomes[w] = trial_with(solvers[c.variant_index], matrices.psi, c.algorithm, c.sparsity,
                                   trial_seed(cfg.master_seed, v, c.algorithm, c.sparsity, t), cfg);
        } catch (const std::exception& e) {
          failures[w] = e.what();
          failed.store(true);
        }
      }
    }
  };

  unsigned threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, total / kTrialChunk)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }

  if (failed) {
    for (std::size_t w = 0; w < total; ++w) {
      if (failures[w].empty()) continue;
      const Cell& c = cells[w / trials];
      const MatrixVariant v = cfg.matrix_variants[c.variant_index];
      const std::size_t t = w % trials;
      throw TrialError(v, c.algorithm, c.sparsity, t, trial_seed(cfg.master_seed, v, c.algorithm, c.sparsity, t),
                       failures[w]);
    }
  }

  ExperimentResult result;
  result.config = cfg;
  result.matrices = std::move(matrices);
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    CurvePoint p;
    p.variant = cfg.matrix_variants[cells[ci].variant_index];
    p.algorithm = cells[ci].algorithm;
    p.sparsity = cells[ci].sparsity;
    p.trials = trials;
    for (std::size_t t = 0; t < trials; ++t) {
      const TrialOutcome& o = outcomes[ci * trials + t];
      p.successes += o.success ? 1 : 0;
      p.nonconverged += o.converged ? 0 : 1;
    }
    result.curves.push_back(p);
  }
  return result;
}

std::string format_curves_csv(const ExperimentResult& r) {
  std::string out = "variant,algorithm,sparsity,trials,successes,frequency,stderr\n";
  for (const auto& c : r.curves) {
    out += std::string(to_string(c.variant)) + ',' + std::string(to_string(c.algorithm)) + ',' +
           std::to_string(c.sparsity) + ',' + std::to_string(c.trials) + ',' + std::to_string(c.successes) + ',' +
           format_real(c.frequency()) + ',' + format_real(c.standard_error()) + '\n';
  }
  return out;
}

std::vector<CurvePoint> parse_curves_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != "variant,algorithm,sparsity,trials,successes,frequency,stderr") {
    throw IoError("curves.csv: unexpected header");
  }
  std::vector<CurvePoint> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::istringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) f.push_back(cell);
    if (f.size() != 7) throw IoError("curves.csv: expected 7 fields in '" + line + "'");
    CurvePoint p;
    try {
      p.variant = parse_matrix_variant(f[0]);
      p.algorithm = parse_algorithm(f[1]);
      p.sparsity = std::stoull(f[2]);
      p.trials = std::stoull(f[3]);
      p.successes = std::stoull(f[4]);
    } catch (const std::exception& e) {
      throw IoError("curves.csv: bad row '" + line + "': " + e.what());
    }
    out.push_back(p);
  }
  return out;
}

std::string format_provenance_json(const ExperimentResult& r) {
  json j;
  j["config"] = json::parse(experiment_config_to_json(r.config));
  j["seeds"] = {{"master", r.config.master_seed.value},
                {"dictionary", r.matrices.dictionary_seed.value},
                {"measurement", r.matrices.phi_seed.value},
                {"trial_seed_scheme", "derive_seed(master, 0x747269616c736565, variant, algorithm, sparsity, trial)"}};
  if (r.config.l > r.config.m) j["welch_bound"] = welch_bound(r.config.m, r.config.l);
  j["matrices"] = json::array();
  for (const auto& p : r.matrices.variants) {
    json e{{"variant", std::string(to_string(p.variant))}, {"mu_a", p.mu_a}, {"mu_cross", p.mu_cross}};
    if (p.report) e["optimizer"] = optimizer_json(*p.report);
    j["matrices"].push_back(std::move(e));
  }
  j["bp_nonconverged"] = json::array();
  for (const auto& c : r.curves) {
    if (c.algorithm != Algorithm::Bp) continue;
    j["bp_nonconverged"].push_back({{"variant", std::string(to_string(c.variant))},
                                    {"sparsity", c.sparsity},
                                    {"count", c.nonconverged}});
  }
  return j.dump(2) + "\n";
}

std::string format_distribution_csv(const CoherenceDistribution& d) {
  std::string out = "pair_label,value\n";
  out.reserve(d.size() * 28);
  for (std::size_t i = 0; i < d.size(); ++i) {
    out += to_string(d.labels[i]);
    out += ',';
    out += format_real(d.values[i]);
    out += '\n';
  }
  return out;
}

std::string format_histogram_csv(const std::vector<HistogramBin>& bins) {
  std::string out = "bin_center,count\n";
  for (const auto& b : bins) out += format_real(b.center) + ',' + std::to_string(b.count) + '\n';
  return out;
}

void emit_results(const ExperimentResult& r, const std::filesystem::path& dir, const EmitOptions& opts) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  write_file_atomic(dir / "curves.csv", format_curves_csv(r));
  write_file_atomic(dir / "provenance.json", format_provenance_json(r));
  if (opts.distributions) {
    for (const auto& p : r.matrices.variants) {
      const std::string name(to_string(p.variant));
      write_file_atomic(dir / ("dist_" + name + "_A.csv"),
                        format_distribution_csv(coherence_distribution_of_A(p.phi * r.matrices.psi)));
      write_file_atomic(dir / ("dist_" + name + "_reduced.csv"),
                        format_distribution_csv(reduced_coherence_distribution(p.phi, r.matrices.psi)));
    }
  }
}

}  // namespace csadapt
