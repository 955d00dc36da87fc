#include <benchmark/benchmark.h>

#include "modeshift/analysis/analysis.hpp"
#include "modeshift/io/scenario_io.hpp"
#include "modeshift/sim/simulator.hpp"
#include "modeshift/synth/synth.hpp"

using namespace modeshift;

namespace {

const std::string kDir = MODESHIFT_SCENARIO_DIR;

synth::ControllerSet gfm() { return synth::make_controllers(synth::apply_mode_point({}, synth::preset("GFM"))); }

void BM_PolynomialRoots(benchmark::State& st) {
  const auto cs = gfm();
  const auto p = (cs.Kq().den() * cs.Kd.den());
  for (auto _ : st) benchmark::DoNotOptimize(p.roots());
  st.SetLabel("degree " + std::to_string(p.degree()));
}
BENCHMARK(BM_PolynomialRoots);

void BM_MakeControllers(benchmark::State& st) {
  const auto p = synth::apply_mode_point({}, synth::preset("GFM"));
  for (auto _ : st) benchmark::DoNotOptimize(synth::make_controllers(p));
}
BENCHMARK(BM_MakeControllers)->Unit(benchmark::kMillisecond);

void BM_Margins(benchmark::State& st) {
  const auto cs = gfm();
  const analysis::Design d{cs, cs.params.line};
  const auto L = analysis::open_loops(d).first;
  for (auto _ : st) benchmark::DoNotOptimize(tf::margins(L));
}
BENCHMARK(BM_Margins)->Unit(benchmark::kMillisecond);

void BM_CheckStability(benchmark::State& st) {
  const auto cs = gfm();
  const analysis::Design d{cs, cs.params.line};
  for (auto _ : st) benchmark::DoNotOptimize(analysis::check_stability(d, cs.params.dw_max));
}
BENCHMARK(BM_CheckStability)->Unit(benchmark::kMillisecond);

// One control period (10 RK4 physics substeps) per iteration.
void BM_SimulatorStep(benchmark::State& st) {
  auto sc = io::load_scenario(kDir + (st.range(0) == 1 ? "/grid_step.toml" : "/ongrid_transitions.toml"));
  sc.solver.duration = 1e3;
  sim::Simulator s(sc);
  for (auto _ : st) s.step();
  st.SetItemsProcessed(st.iterations());
  st.SetLabel(std::to_string(sc.inverters.size()) + " inverter(s)");
}
BENCHMARK(BM_SimulatorStep)->Arg(1)->Arg(3);

void BM_ParseScenario(benchmark::State& st) {
  const std::string text = io::serialize_scenario(io::load_scenario(kDir + "/ongrid_transitions.toml"));
  for (auto _ : st) benchmark::DoNotOptimize(io::parse_scenario(text));
}
BENCHMARK(BM_ParseScenario);

}  // namespace

BENCHMARK_MAIN();
