#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lcris/harness.hpp"

using namespace lcris;
using namespace lcris::harness;

namespace {

ExperimentConfig tiny_config() {
  ExperimentConfig cfg;
  cfg.columns = 4;
  cfg.rows = 2;
  cfg.env_opts.reduced_state = true;
  cfg.scene.waypoint_angles_deg = {-20.0, 20.0};
  cfg.scene.speed = 30.0;  // short passes keep the test fast
  cfg.seeds = {0, 1};
  cfg.eval_steps = 60;
  return cfg;
}

}  // namespace

TEST_CASE("config text round-trips through its canonical form") {
  ExperimentConfig cfg;
  cfg.reward.beta1 = 0.8;
  cfg.reward.beta2 = 0.2;
  cfg.scene.speed = 3.0;
  cfg.seeds = {4, 5, 6};

  const std::string canon = cfg.canonical();
  const ExperimentConfig back = ExperimentConfig::from_string(canon);
  CHECK(back.canonical() == canon);
  CHECK(back.hash() == cfg.hash());

  // defaults hash differently from the modified config
  CHECK(ExperimentConfig{}.hash() != cfg.hash());
  CHECK(ExperimentConfig::from_string("").hash() == ExperimentConfig{}.hash());
}

TEST_CASE("config parser rejects unknown keys with a line number") {
  try {
    ExperimentConfig::from_string("reward.beta1 = 0.5\nnosuch.key = 1\n");
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("nosuch.key") != std::string::npos);
    CHECK(msg.find("2") != std::string::npos);
  }
  CHECK_THROWS_AS(ExperimentConfig::from_string("reward.beta1 = oops"), ConfigError);
  CHECK_NOTHROW(ExperimentConfig::from_string("# comment only\n\n"));
}

TEST_CASE("metric rows round-trip losslessly through CSV") {
  std::vector<metrics::MetricRow> rows(3);
  rows[0] = {0, 0, -60.0, -57.123456789012345, 31.9, 0.0, 10.0, 1234.5678, "optimal"};
  rows[1] = {1, 7, 20.0, -58.0, 1e-17, 7.1, 2.9, 0.0, "realistic"};
  rows[2] = {2, 9, 50.0, -0.1, -3.3333333333333335, 2.5, 7.5, 99.9, "ddpg"};

  const std::string text = metrics::to_csv(rows);
  const std::vector<metrics::MetricRow> back = metrics::parse_csv_string(text);
  REQUIRE(back.size() == rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].run == rows[i].run);
    CHECK(back[i].slot == rows[i].slot);
    CHECK(back[i].snr_db == rows[i].snr_db);    // bitwise, not approx
    CHECK(back[i].rate_mbps == rows[i].rate_mbps);
    CHECK(back[i].controller == rows[i].controller);
  }
  CHECK(metrics::to_csv(back) == text);
}

TEST_CASE("evaluation is deterministic and thread-count invariant") {
  const ExperimentConfig cfg = tiny_config();

  setenv("LCRIS_THREADS", "1", 1);
  const EvalResult serial = run_eval(cfg, "realistic", cfg.seeds);
  setenv("LCRIS_THREADS", "4", 1);
  const EvalResult threaded = run_eval(cfg, "realistic", cfg.seeds);
  unsetenv("LCRIS_THREADS");

  CHECK(metrics::to_csv(serial.rows) == metrics::to_csv(threaded.rows));
  CHECK(serial.rows.size() == cfg.seeds.size() * static_cast<size_t>(cfg.eval_steps));
  for (const auto& row : serial.rows) CHECK(row.controller == "realistic");
}

TEST_CASE("waypoint aggregation picks one arrival per pass") {
  const ExperimentConfig cfg = tiny_config();
  const EvalResult res = run_eval(cfg, "optimal", cfg.seeds);

  REQUIRE(!res.aggregates.empty());
  long arrivals = 0;
  for (const auto& g : res.aggregates) {
    CHECK(g.controller == "optimal");
    CHECK((g.angle_deg == -20.0 || g.angle_deg == 20.0));
    CHECK(g.count % static_cast<long>(cfg.seeds.size()) == 0);
    arrivals += g.count;
  }
  // both waypoint labels show up
  CHECK(res.aggregates.size() == 2);
  CHECK(arrivals >= static_cast<long>(2 * cfg.seeds.size()));
}

TEST_CASE("unknown controller or missing checkpoint is a config error") {
  const ExperimentConfig cfg = tiny_config();
  CHECK_THROWS_AS(run_eval(cfg, "psychic", cfg.seeds), ConfigError);
  CHECK_THROWS_AS(run_eval(cfg, "ddpg", cfg.seeds), ConfigError);  // no checkpoint set
}

TEST_CASE("output emission writes the contract files") {
  namespace fs = std::filesystem;
  const ExperimentConfig cfg = tiny_config();
  const EvalResult res = run_eval(cfg, "realistic", cfg.seeds);

  const fs::path dir = fs::temp_directory_path() / "lcris_test_out";
  fs::remove_all(dir);
  emit_outputs(cfg, res, dir.string(), "plotdata");

  CHECK(fs::exists(dir / "metrics.csv"));
  CHECK(fs::exists(dir / "aggregates.csv"));
  CHECK(fs::exists(dir / "manifest.txt"));
  for (const char* m : {"p_r_dbw", "snr_db", "t_c_ms", "t_k_ms", "rate_mbps"})
    CHECK(fs::exists(dir / ("plot_" + std::string(m) + ".csv")));

  std::ifstream manifest(dir / "manifest.txt");
  std::stringstream buf;
  buf << manifest.rdbuf();
  CHECK(buf.str().find(cfg.hash()) != std::string::npos);

  std::ifstream in(dir / "metrics.csv");
  const auto parsed = metrics::parse_csv(in);
  CHECK(parsed.size() == res.rows.size());
  fs::remove_all(dir);

  CHECK_THROWS_AS(emit_outputs(cfg, res, dir.string(), "xml"), ConfigError);
}

TEST_CASE("sweep emits a long-format comparison table") {
  ExperimentConfig cfg = tiny_config();
  cfg.eval_steps = 20;
  cfg.seeds = {0};
  cfg.sweep_speeds = {1.5, 30.0};

  const std::vector<SweepRow> table = run_sweep(cfg, "speed");
  // 2 speeds x 2 controllers x 5 metrics
  CHECK(table.size() == 20);
  const std::string csv = sweep_to_csv(table);
  CHECK(csv.rfind("axis,value,controller,metric,mean\n", 0) == 0);
  CHECK(csv.find("realistic") != std::string::npos);
  CHECK(csv.find("rate_mbps") != std::string::npos);

  CHECK_THROWS_AS(run_sweep(cfg, "temperature"), ConfigError);
}
