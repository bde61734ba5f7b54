// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only if
// every criterion passes. Progress goes to stderr.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "csadapt/coherence.hpp"
#include "csadapt/dictionary.hpp"
#include "csadapt/harness.hpp"
#include "csadapt/optimizers.hpp"
#include "csadapt/recovery.hpp"
#include "csadapt/stats.hpp"
#include "oracles.hpp"

namespace {

using namespace csadapt;
using Clock = std::chrono::steady_clock;

constexpr Eigen::Index kM = 30, kN = 200, kL = 400;
constexpr int kEffectSeeds = 5;
constexpr int kRankSeeds = 20;
constexpr double kMinReduction = 0.15;
constexpr double kOptimizerBudgetSeconds = 300.0;
constexpr double kExperimentBudgetSeconds = 1800.0;
constexpr double kSuiteBudgetSeconds = 300.0;
constexpr double kRankAlpha = 0.01;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Line {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [violated: " << what << "]";
    }
  }
};

struct SeedRun {
  double mu_a_rand = 0, mu_cross_rand = 0;
  double mu_a_opt = 0, mu_cross_of_mua = 0, mua_seconds = 0;
  double mu_cross_opt = 0, mu_a_of_cross = 0, cross_seconds = 0;
};

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

std::vector<SeedRun> run_optimizers(const DenseMatrix& psi) {
  std::vector<SeedRun> runs;
  for (int s = 1; s <= kRankSeeds; ++s) {
    SeedRun r;
    const DenseMatrix phi = gaussian_matrix(kM, kN, measurement_seed(RngSeed{static_cast<std::uint64_t>(s)}));
    r.mu_a_rand = mutual_coherence(phi * psi);
    r.mu_cross_rand = cross_coherence(phi, psi);

    auto t0 = Clock::now();
    const auto mua = optimize_mu_a(phi, psi, GramShrinkConfig{});
    r.mua_seconds = seconds_since(t0);
    r.mu_a_opt = mua.report.final_coherence;
    r.mu_cross_of_mua = cross_coherence(mua.phi, psi);

    t0 = Clock::now();
    const auto cross = optimize_mu_cross(phi, psi, CrossCoherenceConfig{});
    r.cross_seconds = seconds_since(t0);
    r.mu_cross_opt = cross.report.final_coherence;
    r.mu_a_of_cross = mutual_coherence(cross.phi * psi);

    std::fprintf(stderr, "seed %2d: mu(A) %.4f -> %.4f (%.1fs), mu(phi,psi) %.4f -> %.4f (%.1fs)\n", s, r.mu_a_rand,
                 r.mu_a_opt, r.mua_seconds, r.mu_cross_rand, r.mu_cross_opt, r.cross_seconds);
    runs.push_back(r);
  }
  return runs;
}

Line criterion_mu_a(const std::vector<SeedRun>& runs) {
  Line line;
  std::vector<double> before, after;
  double worst_time = 0, lowest = 1;
  for (int s = 0; s < kEffectSeeds; ++s) {
    before.push_back(runs[static_cast<std::size_t>(s)].mu_a_rand);
    after.push_back(runs[static_cast<std::size_t>(s)].mu_a_opt);
    worst_time = std::max(worst_time, runs[static_cast<std::size_t>(s)].mua_seconds);
    lowest = std::min(lowest, runs[static_cast<std::size_t>(s)].mu_a_opt);
  }
  const double reduction = 1.0 - mean(after) / mean(before);
  const double welch = welch_bound(kM, kL);
  line.detail << "mean mu(A) " << mean(before) << " -> " << mean(after) << " (reduction " << 100 * reduction
              << "%), min " << lowest << " vs Welch " << welch << ", slowest seed " << worst_time << "s";
  line.require(reduction >= kMinReduction, "reduction >= 15%");
  line.require(lowest >= welch - 1e-9, "mu(A) >= Welch bound - 1e-9");
  line.require(worst_time < kOptimizerBudgetSeconds, "< 5 min per seed");
  return line;
}

Line criterion_cross(const std::vector<SeedRun>& runs) {
  Line line;
  std::vector<double> before, after;
  for (int s = 0; s < kEffectSeeds; ++s) {
    before.push_back(runs[static_cast<std::size_t>(s)].mu_cross_rand);
    after.push_back(runs[static_cast<std::size_t>(s)].mu_cross_opt);
  }
  const double reduction = 1.0 - mean(after) / mean(before);
  line.detail << "mean mu(phi,psi) " << mean(before) << " -> " << mean(after) << " (reduction " << 100 * reduction
              << "%)";
  line.require(reduction >= kMinReduction, "reduction >= 15%");
  return line;
}

Line criterion_independence(const std::vector<SeedRun>& runs) {
  Line line;
  std::vector<double> cross_rand, cross_mua, a_rand, a_cross;
  for (const auto& r : runs) {
    cross_rand.push_back(r.mu_cross_rand);
    cross_mua.push_back(r.mu_cross_of_mua);
    a_rand.push_back(r.mu_a_rand);
    a_cross.push_back(r.mu_a_of_cross);
  }
  const RankTestResult t1 = mann_whitney_u(cross_mua, cross_rand);
  const RankTestResult t2 = mann_whitney_u(a_cross, a_rand);
  line.detail << runs.size() << " seeds; mu(phi_muA,psi) mean " << mean(cross_mua) << " vs rand "
              << mean(cross_rand) << " (p=" << t1.p_value << "); mu(A) of phi_cross mean " << mean(a_cross)
              << " vs rand " << mean(a_rand) << " (p=" << t2.p_value << ")";
  line.require(t1.p_value >= kRankAlpha, "rank test on mu(phi_muA, psi) not rejected at 1%");
  line.require(t2.p_value >= kRankAlpha, "rank test on mu(A) of phi_cross not rejected at 1%");
  return line;
}

bool in_transition(const CurvePoint& p) { return p.frequency() > 0.05 && p.frequency() < 0.95; }

Line criterion_omp(const ExperimentResult& r, double seconds) {
  Line line;
  int levels = 0;
  for (std::size_t k : r.config.sparsity_levels) {
    const CurvePoint& rand = r.at(MatrixVariant::Rand, Algorithm::Omp, k);
    const CurvePoint& mua = r.at(MatrixVariant::MuA, Algorithm::Omp, k);
    line.detail << " k=" << k << ":" << rand.frequency() << "/" << mua.frequency();
    if (!in_transition(rand)) continue;
    ++levels;
    const double se = std::hypot(rand.standard_error(), mua.standard_error());
    const double gap = (mua.frequency() - rand.frequency()) / se;
    line.detail << "(" << gap << " SE)";
    line.require(gap > 3.0, "k=" + std::to_string(k) + " gap > 3 SE");
  }
  line.detail << "; " << levels << " transition levels, experiment " << seconds << "s";
  line.require(levels > 0, "at least one transition level");
  line.require(seconds < kExperimentBudgetSeconds, "< 30 min");
  return line;
}

Line criterion_bp(const ExperimentResult& r) {
  Line line;
  std::vector<double> rand_f, cross_f;
  for (std::size_t k : r.config.sparsity_levels) {
    const CurvePoint& rand = r.at(MatrixVariant::Rand, Algorithm::Bp, k);
    const CurvePoint& cross = r.at(MatrixVariant::Cross, Algorithm::Bp, k);
    line.detail << " k=" << k << ":" << rand.frequency() << "/" << cross.frequency();
    if (!in_transition(rand)) continue;
    rand_f.push_back(rand.frequency());
    cross_f.push_back(cross.frequency());
  }
  line.require(!rand_f.empty(), "at least one transition level");
  if (!rand_f.empty()) {
    line.detail << "; transition mean rand " << mean(rand_f) << " cross " << mean(cross_f);
    line.require(mean(cross_f) >= mean(rand_f), "mean cross >= mean rand");
  }
  return line;
}

Line criterion_oracles() {
  Line line;
  // OMP against exhaustive supports in the guarantee regime.
  int omp_cases = 0, omp_mismatch = 0;
  for (int trial = 0; omp_cases < 120 && trial < 1000; ++trial) {
    std::mt19937_64 gen(static_cast<std::uint64_t>(trial) + 1);
    const int k = trial % 3 == 0 ? 1 : 2;
    const Eigen::Index m = k == 1 ? 4 + static_cast<Eigen::Index>(gen() % 7) : 10;
    const Eigen::Index l = m + 2 + static_cast<Eigen::Index>(gen() % static_cast<std::uint64_t>(20 - m - 1));
    DenseMatrix a;
    if (k == 1) {
      std::normal_distribution<double> nd;
      a.resize(m, l);
      for (Eigen::Index j = 0; j < l; ++j)
        for (Eigen::Index i = 0; i < m; ++i) a(i, j) = nd(gen);
    } else {
      a = oracle::low_coherence_matrix(m, l, gen);
    }
    const double mu = oracle::brute_mutual_coherence(a);
    if (!(k < 0.5 * (1.0 + 1.0 / mu))) continue;
    std::vector<int> idx(static_cast<std::size_t>(l));
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), gen);
    Vector alpha = Vector::Zero(l);
    std::normal_distribution<double> nd;
    for (int i = 0; i < k; ++i) alpha(idx[static_cast<std::size_t>(i)]) = nd(gen) + (gen() & 1u ? 1.0 : -1.0);
    const Vector y = a * alpha;
    const auto best = oracle::best_k_support(a, y, k);
    if (best.residual >= 1e-9) continue;
    ++omp_cases;
    const SparseVector got = omp(a, y, static_cast<std::size_t>(k), 0.0);
    bool same = got.sparsity() == static_cast<std::size_t>(k);
    for (int i = 0; same && i < k; ++i)
      same = got.support[static_cast<std::size_t>(i)] == static_cast<std::size_t>(best.support[static_cast<std::size_t>(i)]) &&
             std::abs(got.values[static_cast<std::size_t>(i)] - best.coefficients(i)) < 1e-9;
    omp_mismatch += !same;
  }
  line.detail << "OMP " << omp_cases - omp_mismatch << "/" << omp_cases;
  line.require(omp_cases >= 100 && omp_mismatch == 0, "OMP equals exhaustive oracle on >= 100 instances");

  // BP against LP vertex enumeration.
  int bp_cases = 0, bp_mismatch = 0;
  double bp_worst = 0;
  for (int trial = 0; trial < 120; ++trial) {
    std::mt19937_64 gen(10000u + static_cast<std::uint64_t>(trial));
    std::normal_distribution<double> nd;
    const Eigen::Index m = 2 + static_cast<Eigen::Index>(gen() % 3);
    const Eigen::Index l = m + 1 + static_cast<Eigen::Index>(gen() % static_cast<std::uint64_t>(8 - m));
    DenseMatrix a(m, l);
    for (Eigen::Index j = 0; j < l; ++j)
      for (Eigen::Index i = 0; i < m; ++i) a(i, j) = nd(gen);
    Vector y(m);
    for (Eigen::Index i = 0; i < m; ++i) y(i) = nd(gen);
    const auto opt = oracle::l1_vertex_minimum(a, y);
    if (!opt) continue;
    ++bp_cases;
    const double diff = std::abs(basis_pursuit(a, y).solution.to_dense().lpNorm<1>() - *opt);
    bp_worst = std::max(bp_worst, diff);
    bp_mismatch += !(diff <= 1e-6);
  }
  line.detail << "; BP " << bp_cases - bp_mismatch << "/" << bp_cases << " (worst |dl1| " << bp_worst << ")";
  line.require(bp_cases >= 100 && bp_mismatch == 0, "BP l1 within 1e-6 of vertex oracle on >= 100 instances");

  // Coherences against brute-force double loops, exact equality.
  int coh_cases = 0, coh_mismatch = 0;
  for (int trial = 0; trial < 150; ++trial) {
    std::mt19937_64 gen(20000u + static_cast<std::uint64_t>(trial));
    std::normal_distribution<double> nd;
    const Eigen::Index m = 1 + static_cast<Eigen::Index>(gen() % 8);
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(gen() % 10);
    const Eigen::Index l = 2 + static_cast<Eigen::Index>(gen() % 16);
    DenseMatrix phi(m, n), psi(n, l);
    for (Eigen::Index i = 0; i < phi.size(); ++i) phi(i) = nd(gen);
    for (Eigen::Index i = 0; i < psi.size(); ++i) psi(i) = nd(gen);
    ++coh_cases;
    coh_mismatch += mutual_coherence(psi) != oracle::brute_mutual_coherence(psi) ||
                    cross_coherence(phi, psi) != oracle::brute_cross_coherence(phi, psi);
  }
  line.detail << "; coherence " << coh_cases - coh_mismatch << "/" << coh_cases;
  line.require(coh_mismatch == 0, "coherences equal brute force exactly");
  return line;
}

Line criterion_invariants() {
  Line line;
  const auto t0 = Clock::now();
  const DenseMatrix psi = build_dictionary(IdentityDct{}, kN, kL, RngSeed{0});
  std::mt19937_64 gen(99);
  std::normal_distribution<double> nd;

  // scale invariance
  int scale_bad = 0;
  for (int t = 0; t < 20; ++t) {
    const DenseMatrix a = gaussian_matrix(12, 40, RngSeed{static_cast<std::uint64_t>(t)});
    DenseMatrix b = a;
    b.col(t % 40) *= 7.3;
    DenseMatrix phi = gaussian_matrix(5, 12, RngSeed{100u + static_cast<std::uint64_t>(t)});
    const double c0 = cross_coherence(phi, a);
    phi.row(t % 5) *= 7.3;
    scale_bad += std::abs(mutual_coherence(a) - mutual_coherence(b)) > 1e-12 ||
                 std::abs(cross_coherence(phi, b) - c0) > 1e-12;
  }
  line.require(scale_bad == 0, "scale invariance");

  // Welch floor, including optimized matrices
  int welch_bad = 0;
  for (int t = 0; t < 20; ++t) {
    const Eigen::Index m = 2 + t % 6, l = m + 1 + 3 * (t % 7);
    welch_bad += mutual_coherence(gaussian_matrix(m, l, RngSeed{static_cast<std::uint64_t>(t)})) < welch_bound(m, l) - 1e-12;
  }
  GramShrinkConfig short_run;
  short_run.iterations = 50;
  const DenseMatrix small_psi = build_dictionary(IdentityDct{}, 24, 48, RngSeed{0});
  welch_bad += optimize_mu_a(gaussian_matrix(6, 24, RngSeed{1}), small_psi, short_run).report.final_coherence <
               welch_bound(6, 48) - 1e-9;
  line.require(welch_bad == 0, "Welch floor");

  // OMP residual monotone, BP feasible
  const DenseMatrix a = gaussian_matrix(kM, kN, RngSeed{5}) * psi;
  const OmpSolver omp_solver(a);
  const BasisPursuitSolver bp_solver(a, BpConfig{});
  int mono_bad = 0, feas_bad = 0;
  double worst_feas = 0;
  for (int t = 0; t < 30; ++t) {
    const SparseVector alpha = generate_sparse_vector(kL, 2 + static_cast<std::size_t>(t % 12), RngSeed{static_cast<std::uint64_t>(t)});
    Vector y = a * alpha.to_dense();
    if (t % 3 == 0)
      for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = nd(gen);
    const auto trace = omp_solver.solve_traced(y, static_cast<std::size_t>(kM), 0.0);
    for (std::size_t i = 1; i < trace.residual_norms.size(); ++i)
      mono_bad += trace.residual_norms[i] > trace.residual_norms[i - 1] * (1.0 + 1e-12) + 1e-12 * y.norm();
    const double rel = (a * bp_solver.solve(y).solution.to_dense() - y).norm() / y.norm();
    worst_feas = std::max(worst_feas, rel);
    feas_bad += !(rel < 1e-5);
  }
  line.require(mono_bad == 0, "OMP residual monotone");
  line.require(feas_bad == 0, "BP relative residual < 1e-5");

  // k = 0 and thread-count determinism
  ExperimentConfig cfg;
  cfg.m = 8;
  cfg.n = 24;
  cfg.l = 48;
  cfg.sparsity_levels = {0, 2, 4};
  cfg.trials_per_level = 60;
  cfg.mu_a.iterations = 30;
  cfg.cross.iterations = 100;
  const PreparedMatrices prepared = prepare_matrices(cfg);
  const ExperimentResult r1 = run_experiment(cfg, prepared, RunOptions{1});
  bool k0 = true;
  for (const auto& p : r1.curves)
    if (p.sparsity == 0) k0 = k0 && p.frequency() == 1.0;
  line.require(k0, "k=0 frequency 1");
  const std::string c1 = format_curves_csv(r1);
  const bool det = c1 == format_curves_csv(run_experiment(cfg, prepared, RunOptions{2})) &&
                   c1 == format_curves_csv(run_experiment(cfg, prepared, RunOptions{4}));
  line.require(det, "identical curves for 1, 2 and 4 threads");

  const double secs = seconds_since(t0);
  line.detail << "scale, Welch, OMP monotone, BP feasibility (worst " << worst_feas << "), k=0, threads; " << secs << "s";
  line.require(secs < kSuiteBudgetSeconds, "< 5 min");
  return line;
}

}  // namespace

int main() {
  std::vector<std::pair<std::string, Line>> lines(7);
  const char* names[] = {"mu(A) optimization effectiveness",
                         "cross-coherence optimization effectiveness",
                         "criterion independence (rank tests)",
                         "OMP ordering mu(A) vs rand",
                         "BP ordering cross vs rand",
                         "solver and coherence oracle suites",
                         "invariant suites"};

  auto t0 = Clock::now();
  lines[5].second = criterion_oracles();
  std::fprintf(stderr, "oracle suites: %.1fs\n", seconds_since(t0));
  lines[6].second = criterion_invariants();

  const DenseMatrix psi = build_dictionary(IdentityDct{}, kN, kL, RngSeed{0});
  const std::vector<SeedRun> runs = run_optimizers(psi);
  lines[0].second = criterion_mu_a(runs);
  lines[1].second = criterion_cross(runs);
  lines[2].second = criterion_independence(runs);

  ExperimentConfig cfg;  // M=30, N=200, L=400, [I|DCT], 2000 trials, k in {2..12}
  t0 = Clock::now();
  const ExperimentResult r = run_experiment(cfg);
  const double exp_seconds = seconds_since(t0);
  lines[3].second = criterion_omp(r, exp_seconds);
  lines[4].second = criterion_bp(r);

  bool all = true;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const Line& l = lines[i].second;
    all = all && l.pass;
    std::cout << (l.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << ": " << names[i] << " | " << l.detail.str()
              << "\n";
  }
  std::cout << (all ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL") << std::endl;
  return all ? 0 : 1;
}
