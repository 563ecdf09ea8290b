// Serial reference against the OpenMP path for the heavier check kernels.
#include <benchmark/benchmark.h>

#include "shiftforge/block_ops.hpp"
#include "shiftforge/cli_io.hpp"
#include "shiftforge/decomposition.hpp"
#include "shiftforge/sampler.hpp"

using namespace shiftforge;

namespace {

ShiftPtr fixture(const char* name) { return load_spec(std::string(SHIFTFORGE_FIXTURE_DIR) + "/" + name).shift; }

Exec exec_of(const benchmark::State& st) { return st.range(0) == 0 ? Exec::Serial : Exec::Parallel; }

void BM_Closure(benchmark::State& st) {
  auto p = fixture("z4_coset.json");
  for (auto _ : st) benchmark::DoNotOptimize(verify_closure(*p, 16, exec_of(st)));
}

void BM_Axioms(benchmark::State& st) {
  auto p = fixture("prufer_fractal.json");
  auto xs = sample_sequences(*p, 600, 7);
  for (auto _ : st) benchmark::DoNotOptimize(axiom_suite(*p, xs, exec_of(st)));
}

void BM_Composite(benchmark::State& st) {
  DecomposeOptions opt;
  opt.verify = false;
  auto r = decompose(fixture("z4_coset.json"), opt);
  opt.exec = exec_of(st);
  opt.transient = opt.period = 3;
  for (auto _ : st) benchmark::DoNotOptimize(verify_composite(r, opt));
}

}  // namespace

BENCHMARK(BM_Closure)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Axioms)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Composite)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
