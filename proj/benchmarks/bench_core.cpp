#include <benchmark/benchmark.h>

#include <random>

#include "subshift/construction.hpp"

using namespace subshift;

namespace {

const AperiodicSequence& mobius() {
  static const AperiodicSequence y = mobius_sieve(4'000'000);
  return y;
}

std::vector<Symbol> random_block(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::vector<Symbol> b(n);
  for (auto& s : b) s = static_cast<Symbol>(gen() & 1);
  return b;
}

ParamSchedule toy_schedule() {
  std::map<std::uint64_t, StepOverride> ov;
  ov[0].epsilon = 0.4;
  ov[0].delta = 0.0;
  ov[0].horizon_cap = 1.0;
  ov[2].epsilon = 0.3;
  return ParamSchedule(2, 4, ScheduleMode::relaxed, {}, 2, ov);
}

}  // namespace

static void BM_MobiusSieve(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(mobius_sieve(n));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_MobiusSieve)->Arg(100'000)->Arg(1'000'000)->Arg(10'000'000)->Unit(benchmark::kMillisecond);

// Full (R) sweep of one code image: (m^2 - 1) N_k windows of length N_k.
static void BM_CorrSweep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::uint64_t m = 4;
  const auto B = random_block(n, 1);
  const auto fB = code_apply(code_from_index(1, 2), B);
  const auto& y = mobius();
  for (auto _ : state) {
    benchmark::DoNotOptimize(corr_sweep(fB.signs(), y, 1, (m * m - 1) * n, n, 2.0));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>((m * m - 1) * n));
}
BENCHMARK(BM_CorrSweep)->RangeMultiplier(4)->Range(16, 4096);

static void BM_CheckR(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto B = random_block(n, 2);
  const auto F = eligible_codes(2, 20, 2.0);
  const auto& y = mobius();
  for (auto _ : state) benchmark::DoNotOptimize(check_R(B, F, y, 0.5, 0.0, 4));
}
BENCHMARK(BM_CheckR)->RangeMultiplier(4)->Range(16, 1024);

// Level 2 of the N = 2, M = 4 toy: 16^4 candidates, exhaustive.
static void BM_BuildStep(benchmark::State& state) {
  const auto sched = toy_schedule();
  const auto s1 = derive_step(sched, 1);
  const auto g1 = build_family(BlockFamily::alphabet_level(Alphabet(2)), s1, step_codes(s1, 2),
                               mobius(), BuildMode{}).family;
  const auto s2 = derive_step(sched, 2);
  const auto F = step_codes(s2, 2);
  BuildOptions opt;
  opt.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_family(g1, s2, F, mobius(), BuildMode{}, opt));
  state.SetItemsProcessed(state.iterations() * 65536);
}
BENCHMARK(BM_BuildStep)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
