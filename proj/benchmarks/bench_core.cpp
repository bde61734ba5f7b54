#include <benchmark/benchmark.h>

#include "csadapt/coherence.hpp"
#include "csadapt/dictionary.hpp"
#include "csadapt/harness.hpp"
#include "csadapt/optimizers.hpp"
#include "csadapt/recovery.hpp"

namespace {

using namespace csadapt;

struct Fixture {
  DenseMatrix psi = build_dictionary(IdentityDct{}, 200, 400, RngSeed{0});
  DenseMatrix phi = gaussian_matrix(30, 200, RngSeed{1});
  DenseMatrix a = phi * psi;
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_MutualCoherence(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(mutual_coherence(f.a));
}
BENCHMARK(BM_MutualCoherence)->Unit(benchmark::kMillisecond);

void BM_CrossCoherence(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(cross_coherence(f.phi, f.psi));
}
BENCHMARK(BM_CrossCoherence)->Unit(benchmark::kMillisecond);

void BM_SymmetricEigen400(benchmark::State& state) {
  const auto& f = fixture();
  const DenseMatrix an = normalize_columns(f.a);
  const DenseMatrix g = an.transpose() * an;
  for (auto _ : state) benchmark::DoNotOptimize(symmetric_eigen(g).values(0));
}
BENCHMARK(BM_SymmetricEigen400)->Unit(benchmark::kMillisecond);

void BM_GramShrinkIteration(benchmark::State& state) {
  const auto& f = fixture();
  GramShrinkConfig cfg;
  cfg.iterations = 1;
  for (auto _ : state) benchmark::DoNotOptimize(optimize_mu_a(f.phi, f.psi, cfg).report.final_coherence);
}
BENCHMARK(BM_GramShrinkIteration)->Unit(benchmark::kMillisecond);

void BM_CrossDescentIteration(benchmark::State& state) {
  const auto& f = fixture();
  CrossCoherenceConfig cfg;
  cfg.iterations = 10;
  for (auto _ : state) benchmark::DoNotOptimize(optimize_mu_cross(f.phi, f.psi, cfg).report.final_coherence);
}
BENCHMARK(BM_CrossDescentIteration)->Unit(benchmark::kMillisecond);

void BM_Omp(benchmark::State& state) {
  const auto& f = fixture();
  const auto k = static_cast<std::size_t>(state.range(0));
  const OmpSolver solver(f.a);
  const Vector y = f.a * generate_sparse_vector(400, k, RngSeed{5}).to_dense();
  for (auto _ : state) benchmark::DoNotOptimize(solver.solve(y, k, 1e-7).sparsity());
}
BENCHMARK(BM_Omp)->Arg(4)->Arg(8)->Arg(12)->Unit(benchmark::kMicrosecond);

void BM_BasisPursuit(benchmark::State& state) {
  const auto& f = fixture();
  const BasisPursuitSolver solver(f.a, BpConfig{});
  const Vector y = f.a * generate_sparse_vector(400, static_cast<std::size_t>(state.range(0)), RngSeed{5}).to_dense();
  for (auto _ : state) benchmark::DoNotOptimize(solver.solve(y).iterations);
}
BENCHMARK(BM_BasisPursuit)->Arg(4)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
