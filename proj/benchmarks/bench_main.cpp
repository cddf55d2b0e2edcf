#include <benchmark/benchmark.h>

#include <vector>

#include "silevy/jumps.hpp"
#include "silevy/laws.hpp"
#include "silevy/simulate.hpp"
#include "silevy/verify.hpp"

using namespace silevy;

namespace {

ProcessSpec make(const char* triplet, std::size_t dim, int level) {
  ProcessSpec s;
  s.triplet = verify::shipped_triplet(triplet);
  s.dimension = dim;
  s.level = level;
  s.seed = 42;
  return s;
}

}  // namespace

static void BM_SamplePath(benchmark::State& state) {
  const auto s = make("jump-diffusion", 2, static_cast<int>(state.range(0)));
  std::uint64_t id = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_path(s, id++));
}
BENCHMARK(BM_SamplePath)->Arg(4)->Arg(6)->Arg(8);

static void BM_Evaluate(benchmark::State& state) {
  const auto path = sample_path(make("jump-diffusion", 2, 8), 0);
  const IncrementRegion r(RectSet{0.75, 0.5}, {RectSet{0.25, 0.5}});
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(path, r));
}
BENCHMARK(BM_Evaluate);

static void BM_MuPowerT(benchmark::State& state) {
  const auto t = verify::shipped_triplet(state.range(0) == 0 ? "compound-normal" : "truncated-stable");
  for (auto _ : state) benchmark::DoNotOptimize(mu_power_t(t, 0.5));
}
BENCHMARK(BM_MuPowerT)->Arg(0)->Arg(1);

static void BM_FddChar(benchmark::State& state) {
  const auto s = make("jump-diffusion", 2, 3);
  const std::vector<IncrementRegion> regions = {IncrementRegion(RectSet{0.75, 0.5}), IncrementRegion(RectSet{0.5, 0.75}),
                                                IncrementRegion(RectSet{1, 1}, {RectSet{0.25, 0.25}})};
  const std::vector<double> lambdas = {0.5, -1.0, 0.25};
  for (auto _ : state) benchmark::DoNotOptimize(fdd_char(s, regions, lambdas));
}
BENCHMARK(BM_FddChar);

static void BM_ExtractJumps(benchmark::State& state) {
  const auto t = verify::shipped_triplet("jump-diffusion");
  const auto path = sample_path(make("jump-diffusion", 2, 8), 3);
  for (auto _ : state) benchmark::DoNotOptimize(extract_jumps(path, 8, 0.5 * t.nu.min_abs_jump()));
}
BENCHMARK(BM_ExtractJumps);

BENCHMARK_MAIN();
