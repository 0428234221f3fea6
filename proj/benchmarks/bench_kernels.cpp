#include <benchmark/benchmark.h>

#include "mscale/cme.hpp"
#include "mscale/constrained.hpp"
#include "mscale/fpe_stationary.hpp"
#include "mscale/special_functions.hpp"
#include "mscale/ssa.hpp"
#include "mscale/systems.hpp"

namespace {

using namespace mscale;

void BM_SsaLinear(benchmark::State& state) {
  const auto spec = linear_system();
  const StateVector x0{100, 100};
  RandomStream rng(1, 0);
  std::uint64_t events = 0;
  for (auto _ : state) {
    const auto tr = simulate(spec.network, x0, 1.0, rng);
    events += tr.events;
  }
  state.counters["events/s"] = benchmark::Counter(static_cast<double>(events), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_SsaLinear);

void BM_CssaBistable(benchmark::State& state) {
  const auto spec = bistable_system();
  RandomStream rng(1, 0);
  for (auto _ : state) {
    auto stats = run_cssa(spec.network, spec.projection, 400, StopRule::events(state.range(0)), rng);
    benchmark::DoNotOptimize(stats.iterations);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CssaBistable)->Arg(10)->Arg(100);

void BM_FastSubsystem(benchmark::State& state) {
  const auto spec = bistable_system();
  RandomStream rng(1, 0);
  for (auto _ : state) {
    auto avg = run_fast_subsystem(spec.network, spec.projection, 400,
                                  static_cast<std::uint64_t>(state.range(0)), rng);
    benchmark::DoNotOptimize(avg.means.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FastSubsystem)->Arg(1000)->Arg(100000);

void BM_LowerIncompleteGamma(benchmark::State& state) {
  const double k = static_cast<double>(state.range(0));
  double x = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(log_lower_incomplete_gamma(k, x));
    x = x < 2.0 * k ? x + 0.37 : 0.5;
  }
}
BENCHMARK(BM_LowerIncompleteGamma)->Arg(10)->Arg(300);

void BM_BirthDeathPmf(benchmark::State& state) {
  for (auto _ : state) {
    auto pmf = birth_death_pmf(static_cast<double>(state.range(0)), 2 * state.range(0) + 100);
    benchmark::DoNotOptimize(pmf.masses.data());
  }
}
BENCHMARK(BM_BirthDeathPmf)->Arg(50)->Arg(300);

void BM_BuildGenerator(benchmark::State& state) {
  const auto spec = bistable_system();
  const auto n = static_cast<Count>(state.range(0));
  const TruncatedDomain domain({n, n + n / 2});
  for (auto _ : state) {
    auto g = build_generator(spec.network, domain);
    benchmark::DoNotOptimize(g.matrix.nonZeros());
  }
  state.counters["states"] = static_cast<double>(domain.size());
}
BENCHMARK(BM_BuildGenerator)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_SolveStationaryFpe(benchmark::State& state) {
  const auto spec = linear_system();
  const auto grid = integer_grid(101, 300);
  TableOptions opt;
  const auto table = build_table(spec, grid, opt);
  for (auto _ : state) {
    auto pmf = fpe_pmf(table);
    benchmark::DoNotOptimize(pmf.masses.data());
  }
}
BENCHMARK(BM_SolveStationaryFpe);

}  // namespace
BENCHMARK_MAIN();
