// OpenMP kernel execution against the serial reference on the Maxwell and
// Weyl right-hand sides. Arg: interior points per axis. The "openmp1" rows
// run the OpenMP path on one thread, separating threading from the cost of
// the interpreted reference.

#include <benchmark/benchmark.h>
#include <omp.h>

#include <map>
#include <random>
#include <string>

#include "tensorc/driver.hpp"
#include "tensorc/execute.hpp"
#include "tensorc/system.hpp"

using namespace tensorc;

namespace {

const KernelIR& rhs_of(const std::string& file) {
  static std::map<std::string, KernelIR> cache;
  auto it = cache.find(file);
  if (it == cache.end()) {
    const CompiledSystem c = compile_system(load_system(std::string(TENSORC_SYSTEMS) + "/" + file));
    it = cache.emplace(file, *c.rhs_kernel).first;
  }
  return it->second;
}

GridState random_state(const KernelIR& k, int n) {
  Grid g;
  g.n = {n, n, n};
  g.spacing = {1.0 / n, 1.0 / n, 1.0 / n};
  GridState s(g);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  for (const auto& name : k.inputs) {
    for (double& v : s.add(name)) v = u(rng);
  }
  for (const auto& name : k.outputs) s.add(name);
  return s;
}

ParamMap params_of(const KernelIR& k) {
  ParamMap p;
  for (const auto& name : k.parameters) p[name] = 0.5;
  return p;
}

template <bool Parallel>
void run_kernel(benchmark::State& st, const std::string& file, int threads = 0) {
  const KernelIR& k = rhs_of(file);
  const int saved = omp_get_max_threads();
  if (threads > 0) omp_set_num_threads(threads);
  const int n = static_cast<int>(st.range(0));
  GridState s = random_state(k, n);
  const ParamMap p = params_of(k);
  for (auto _ : st) {
    if constexpr (Parallel) execute_kernel(k, s, p);
    else execute_kernel_serial(k, s, p);
    benchmark::ClobberMemory();
  }
  st.SetItemsProcessed(st.iterations() * static_cast<int64_t>(n) * n * n);
  st.counters["threads"] = threads > 0 ? threads : saved;
  omp_set_num_threads(saved);
}

void BM_maxwell_openmp(benchmark::State& st) { run_kernel<true>(st, "maxwell.tsys"); }
void BM_maxwell_openmp1(benchmark::State& st) { run_kernel<true>(st, "maxwell.tsys", 1); }
void BM_maxwell_serial(benchmark::State& st) { run_kernel<false>(st, "maxwell.tsys"); }
void BM_weyl_openmp(benchmark::State& st) { run_kernel<true>(st, "weyl_frame.tsys"); }
void BM_weyl_openmp1(benchmark::State& st) { run_kernel<true>(st, "weyl_frame.tsys", 1); }
void BM_weyl_serial(benchmark::State& st) { run_kernel<false>(st, "weyl_frame.tsys"); }

}  // namespace

BENCHMARK(BM_maxwell_openmp)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_maxwell_openmp1)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_maxwell_serial)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_weyl_openmp)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_weyl_openmp1)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_weyl_serial)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
