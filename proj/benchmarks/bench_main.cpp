#include <benchmark/benchmark.h>

#include <cmath>

#include "omegascale/classical_scale.hpp"
#include "omegascale/closed_forms.hpp"
#include "omegascale/fluctuation.hpp"
#include "omegascale/mc_oracle.hpp"
#include "omegascale/omega_scale.hpp"
#include "omegascale/special_fn.hpp"

using namespace omegascale;

namespace {

const LevyModel bm = BrownianDrift{1.0, std::sqrt(2.0)};
const LevyModel cl = CramerLundberg{1.0, 1.0, 2.0};
const OmegaSpec band(BandOmega{0.3, 1.0, 0.5, 1.2});

const LevyModel& model(int index) { return index == 0 ? bm : cl; }

}  // namespace

static void BM_ClassicalW(benchmark::State& state) {
  const LevyModel& m = model(static_cast<int>(state.range(0)));
  double x = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(w_q(m, 0.7, x));
    x = x < 5.0 ? x + 1e-3 : 0.0;
  }
}
BENCHMARK(BM_ClassicalW)->Arg(0)->Arg(1);

static void BM_Kummer(benchmark::State& state) {
  double z = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(special::kummer_1f1(1.3, 2.7, z));
    z = z < 20.0 ? z + 0.01 : 0.1;
  }
}
BENCHMARK(BM_Kummer);

static void BM_BesselK(benchmark::State& state) {
  double z = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(special::bessel_k(1.2, z));
    z = z < 20.0 ? z + 0.01 : 0.1;
  }
}
BENCHMARK(BM_BesselK);

// Renewal solve cost against the number of nodes on [0, 2].
static void BM_BuildWOmega(benchmark::State& state) {
  const LevyModel& m = model(static_cast<int>(state.range(0)));
  const double h = 2.0 / static_cast<double>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(build_w_omega(m, band, Grid{2.0, h}));
  state.SetComplexityN(state.range(1));
}
BENCHMARK(BM_BuildWOmega)
    ->ArgsProduct({{0, 1}, {250, 500, 1000, 2000, 4000}})
    ->Complexity(benchmark::oNSquared)
    ->Unit(benchmark::kMillisecond);

static void BM_BuildHOmega(benchmark::State& state) {
  const LevyModel& m = model(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build_h_omega(m, band, Grid{2.0, 1e-3}));
}
BENCHMARK(BM_BuildHOmega)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_ExitIdentity(benchmark::State& state) {
  const OmegaScale s = build_w_omega(bm, band, Grid{2.0, 1e-3});
  double x = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(exit_a(x, 2.0, s));
    x = x + 1e-3 <= 2.0 ? x + 1e-3 : 0.0;
  }
}
BENCHMARK(BM_ExitIdentity);

static void BM_ResolventU(benchmark::State& state) {
  const Grid grid{2.0, 1e-3};
  const OmegaScale s = build_w_omega(bm, band, grid);
  const ScaleContext ctx{bm, band, grid, {}};
  PanelOptions po;
  po.nodes = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(resolvent_u(ctx, s, 1.0, 2.0, po));
}
BENCHMARK(BM_ResolventU)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

static void BM_BandComposites(benchmark::State& state) {
  double x = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(band_composites(cl, 0.3, 1.0, 0.5, 1.2, x));
    x = x < 2.5 ? x + 1e-3 : 0.0;
  }
}
BENCHMARK(BM_BandComposites);

static void BM_OmegaModel(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(omega_model_bankruptcy(0.2, 0.5, 1.0, 1.0, 1.0, 0.5));
}
BENCHMARK(BM_OmegaModel);

// Monte Carlo throughput in paths per second.
static void BM_SimulateExit(benchmark::State& state) {
  SimConfig cfg;
  cfg.model = model(static_cast<int>(state.range(0)));
  cfg.omega = band;
  cfg.n_paths = 2000;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_exit(cfg, 1.0, 2.0));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cfg.n_paths));
}
BENCHMARK(BM_SimulateExit)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
