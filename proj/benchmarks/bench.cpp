#include <benchmark/benchmark.h>

#include "slantgeo/run.hpp"

using namespace slantgeo;

namespace {

void BM_SplitAt(benchmark::State& state) {
  const Scenario sc = load_builtin(state.range(0) == 0 ? "ex3_1" : "ex4_1");
  const auto pts = sample_points(sc.sample, sc.map->m());
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(split_at(*sc.map, as_span(pts[i++ % pts.size()])));
  }
}
BENCHMARK(BM_SplitAt)->Arg(0)->Arg(1);

void BM_VerifyBuiltin(benchmark::State& state) {
  const char* name = state.range(0) == 0 ? "ex3_1" : "ex4_1";
  RunOptions o;
  o.timestamp = false;
  for (auto _ : state) benchmark::DoNotOptimize(verify_builtin(name, {}, o));
}
BENCHMARK(BM_VerifyBuiltin)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_EvalJet2(benchmark::State& state) {
  const ScalarExpr e = parse("exp(x1)*cos(x3) + sinh(x2)^2/sqrt(1 + x4^2)", 4);
  const std::vector<double> x{0.1, -0.4, 0.7, 0.3};
  for (auto _ : state) benchmark::DoNotOptimize(e.eval_jet2(x));
}
BENCHMARK(BM_EvalJet2);

}  // namespace
BENCHMARK_MAIN();
