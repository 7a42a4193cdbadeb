// Hot-path micro-benchmarks: channel synthesis, beam combining, LC timing
// and the actor forward pass.

#include <benchmark/benchmark.h>

#include "lcris/baselines.hpp"
#include "lcris/ddpg.hpp"
#include "lcris/harness.hpp"

using namespace lcris;

namespace {

scene::Snapshot make_snapshot() {
  harness::ExperimentConfig cfg;
  scene::SceneConfig sc = cfg.scene;
  sc.slot_duration = cfg.slot_ms * 1e-3;
  scene::SnapshotStream stream(sc, cfg.array_spec(), cfg.channel, 4, 1);
  return stream.next();
}

void BM_BuildChannel(benchmark::State& state) {
  harness::ExperimentConfig cfg;
  const channel::ArraySpec spec = cfg.array_spec();
  channel::LinkGeometry geom;
  geom.distance = 12.0;
  geom.azimuth = 0.7;
  geom.tag = channel::LinkTag::RisUser;
  Rng rng(7);
  for (auto _ : state)
    benchmark::DoNotOptimize(channel::build_channel(geom, spec, 20.0, 1.0, rng));
}
BENCHMARK(BM_BuildChannel);

void BM_EffectiveChannel(benchmark::State& state) {
  harness::ExperimentConfig cfg;
  const channel::ArraySpec spec = cfg.array_spec();
  const scene::Snapshot snap = make_snapshot();
  const Eigen::VectorXd phases =
      Eigen::VectorXd::LinSpaced(spec.size(), 0.1, 6.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        channel::effective_channel(snap.h_ar, snap.h_ru, phases, spec));
}
BENCHMARK(BM_EffectiveChannel);

void BM_PanelConfigTime(benchmark::State& state) {
  lc::PanelState panel;
  panel.phases = Eigen::VectorXd::LinSpaced(30, 0.5, 5.5);
  const Eigen::VectorXd targets = Eigen::VectorXd::LinSpaced(30, 1.0, 5.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(lc::panel_config_time(panel, targets));
}
BENCHMARK(BM_PanelConfigTime);

void BM_ActorForward(benchmark::State& state) {
  agent::DdpgConfig cfg;
  agent::DdpgAgent ag(184, 30, cfg, 3);
  const Eigen::VectorXd s = Eigen::VectorXd::Random(184);
  for (auto _ : state) benchmark::DoNotOptimize(ag.act(s));
}
BENCHMARK(BM_ActorForward);

}  // namespace

BENCHMARK_MAIN();
