#include <benchmark/benchmark.h>

#include <cstdint>
#include <utility>
#include <vector>

#include "mmdvar/estimators.hpp"
#include "mmdvar/gram_pack.hpp"
#include "mmdvar/kernels.hpp"
#include "mmdvar/oracle.hpp"
#include "mmdvar/random.hpp"

namespace {

using namespace mmdvar;

SampleSet gaussian(StreamRng& rng, std::size_t m, std::size_t d, double mean) {
  std::vector<double> v(m * d);
  for (double& e : v) e = mean + rng.normal();
  return SampleSet(m, d, std::move(v));
}

struct Triple {
  SampleSet x, y, z;
};

Triple make_triple(std::size_t m, std::size_t d) {
  StreamRng rng(99, m);
  SampleSet x = gaussian(rng, m, d, 0.0);
  SampleSet y = gaussian(rng, m, d, 0.2);
  SampleSet z = gaussian(rng, m, d, -0.1);
  return {std::move(x), std::move(y), std::move(z)};
}

void BM_MedianHeuristic(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const Triple t = make_triple(m, 10);
  const std::array<const SampleSet*, 2> parts{&t.x, &t.y};
  const SampleSet pooled = SampleSet::pooled(parts);
  for (auto _ : state) benchmark::DoNotOptimize(median_heuristic(pooled));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_MedianHeuristic)->Arg(250)->Arg(500)->Arg(1000)->Arg(2000)->Complexity();

void BM_GramBuild(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const Triple t = make_triple(m, 10);
  const KernelSpec k = KernelSpec::rbf(4.0);
  for (auto _ : state) {
    GramPack g = GramPack::build(t.x, t.y, k);
    benchmark::DoNotOptimize(g);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_GramBuild)->Arg(250)->Arg(500)->Arg(1000)->Arg(2000)->Complexity();

void BM_MmdAndVhat(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const Triple t = make_triple(m, 10);
  const GramPack g = GramPack::build(t.x, t.y, KernelSpec::rbf(4.0));
  for (auto _ : state) benchmark::DoNotOptimize(mmd2_u(g) + vhat_m(g));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_MmdAndVhat)->Arg(250)->Arg(500)->Arg(1000)->Arg(2000)->Complexity();

void BM_Nuhat(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const Triple t = make_triple(m, 10);
  const GramPack g = GramPack::build(t.x, t.y, t.z, KernelSpec::rbf(4.0));
  for (auto _ : state) benchmark::DoNotOptimize(nuhat_m(g));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Nuhat)->Arg(250)->Arg(500)->Arg(1000)->Arg(2000)->Complexity();

/// End to end at the size used by the performance check.
void BM_EndToEndMedian(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const Triple t = make_triple(m, 10);
  for (auto _ : state) {
    const GramPack g = GramPack::build(t.x, t.y, KernelSpec::rbf_median());
    benchmark::DoNotOptimize(mmd2_u(g) + vhat_m(g));
  }
}
BENCHMARK(BM_EndToEndMedian)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

/// The brute-force reference, for contrast with the matrix form.
void BM_OracleSubTerms(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const Triple t = make_triple(m, 3);
  const GramPack g = GramPack::build(t.x, t.y, t.z, KernelSpec::rbf(2.0));
  for (auto _ : state) benchmark::DoNotOptimize(oracle_sub_terms(g));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_OracleSubTerms)->DenseRange(4, 12, 4)->Complexity();

void BM_FastSubTerms(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const Triple t = make_triple(m, 3);
  const GramPack g = GramPack::build(t.x, t.y, t.z, KernelSpec::rbf(2.0));
  for (auto _ : state) benchmark::DoNotOptimize(estimate_sub_terms(g));
}
BENCHMARK(BM_FastSubTerms)->DenseRange(4, 12, 4);

}  // namespace

BENCHMARK_MAIN();
