#include <benchmark/benchmark.h>

#include <random>

#include "vfree/case_studies.hpp"
#include "vfree/defspace.hpp"
#include "vfree/genericity.hpp"

using namespace vfree;

namespace {

const GraphOfGroups& sl2z() {
  static const GraphOfGroups g = builtin_graph("sl2z");
  return g;
}

GroupWord random_word(const GraphOfGroups& g, std::size_t letters, std::mt19937_64& rng) {
  const Element a = *g.vertex_group(0).generator("a");
  const Element b = *g.vertex_group(1).generator("b");
  GroupWord w{0, {}};
  std::size_t at = 0;
  for (std::size_t i = 0; i < letters; ++i) {
    std::size_t want = rng() & 1;
    if (want != at) {
      w.syllables.emplace_back(Traversal{0, at == 1});
      at = want;
    }
    w.syllables.emplace_back(want == 0 ? a : b);
  }
  if (at != 0) w.syllables.emplace_back(Traversal{0, true});
  return w;
}

RandomWalkSpec uniform(const GraphOfGroups& g) {
  RandomWalkSpec spec;
  for (const char* w : {"a", "a^-1", "b", "b^-1"}) {
    spec.support.push_back(parse_word(g, w));
    spec.weights.push_back({1, 4});
  }
  return spec;
}

}  // namespace

static void BM_NormalForm(benchmark::State& state) {
  std::mt19937_64 rng(1);
  GroupWord w = random_word(sl2z(), static_cast<std::size_t>(state.range(0)), rng);
  for (auto _ : state) benchmark::DoNotOptimize(normal_form(sl2z(), w));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_NormalForm)->RangeMultiplier(4)->Range(8, 512)->Complexity();

static void BM_Classify(benchmark::State& state) {
  std::mt19937_64 rng(2);
  NormalForm w = normal_form(sl2z(), random_word(sl2z(), static_cast<std::size_t>(state.range(0)), rng));
  for (auto _ : state) benchmark::DoNotOptimize(classify(sl2z(), w));
}
BENCHMARK(BM_Classify)->RangeMultiplier(4)->Range(8, 512);

static void BM_Whitehead(benchmark::State& state) {
  const GraphOfGroups g = builtin_graph("z4_z6");
  NormalForm w = parse_word(g, "a b a^-1 b^2 a^2 b^-1");
  for (auto _ : state) benchmark::DoNotOptimize(fills(g, w));
}
BENCHMARK(BM_Whitehead);

static void BM_RandomWalk(benchmark::State& state) {
  RandomWalkSpec spec = uniform(sl2z());
  std::uint64_t seed = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(random_walk(sl2z(), spec, static_cast<std::size_t>(state.range(0)), ++seed));
}
BENCHMARK(BM_RandomWalk)->Arg(32)->Arg(128)->Arg(512);

static void BM_GenericityExperiment(benchmark::State& state) {
  RandomWalkSpec spec = uniform(sl2z());
  spec.trials = 200;
  spec.seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(run_genericity_experiment(sl2z(), spec, {8, 32, 128}));
}
BENCHMARK(BM_GenericityExperiment)->Unit(benchmark::kMillisecond);

static void BM_VerifyCounterexample(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(verify_counterexample());
}
BENCHMARK(BM_VerifyCounterexample)->Unit(benchmark::kMillisecond);

static void BM_VerifySl2z(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(verify_sl2z());
}
BENCHMARK(BM_VerifySl2z)->Unit(benchmark::kMillisecond);

static void BM_EnumerateReduced(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_reduced(2, 1, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_EnumerateReduced)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
