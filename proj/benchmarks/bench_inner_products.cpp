#include <benchmark/benchmark.h>

#include "tritz/cp_function.hpp"
#include "tritz/ritz.hpp"
#include "tritz/solver.hpp"

#include <vector>

namespace {

std::vector<tritz::Mesh1D> unit_meshes(int dim, int n_elems) {
  return std::vector<tritz::Mesh1D>(static_cast<std::size_t>(dim),
                                    tritz::build_mesh(0.0, 1.0, n_elems));
}

void BM_InnerL2(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const auto u = tritz::CPFunction::random_uniform(unit_meshes(dim, 63), 4, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(tritz::inner_l2(u, u));
  }
  state.SetComplexityN(dim);
}
BENCHMARK(BM_InnerL2)->RangeMultiplier(2)->Range(2, 32)->Complexity(benchmark::oN);

void BM_GramCache(benchmark::State& state) {
  const int n_elems = static_cast<int>(state.range(0));
  const auto u = tritz::CPFunction::random_uniform(unit_meshes(4, n_elems), 6, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(tritz::gram_cache(u, u));
  }
  state.SetComplexityN(n_elems);
}
BENCHMARK(BM_GramCache)->RangeMultiplier(4)->Range(16, 1024)->Complexity(benchmark::oN);

void BM_Sweep3D(benchmark::State& state) {
  const int n_elems = static_cast<int>(state.range(0));
  const auto p = tritz::make_cosine_problem(3);
  const auto u0 = tritz::CPFunction::random_uniform(unit_meshes(3, n_elems), 6, 1);
  tritz::SolverOptions opts;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tritz::sweep(p, u0, opts));
  }
}
BENCHMARK(BM_Sweep3D)->RangeMultiplier(2)->Range(16, 128)->Unit(benchmark::kMillisecond);

void BM_FullGradient(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const auto p = tritz::make_cosine_problem(dim);
  const auto u = tritz::CPFunction::random_uniform(unit_meshes(dim, 63), 2 * dim, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(tritz::full_gradient(p, u));
  }
}
BENCHMARK(BM_FullGradient)->DenseRange(2, 6, 2);

}  // namespace

BENCHMARK_MAIN();
