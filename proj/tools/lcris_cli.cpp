// Batch CLI for the LC-RIS link simulator: train / eval / baseline /
// sweep / report. Exit codes: 0 ok, 2 configuration error, 3 physical
// constraint violation, 1 anything else.

#include <CLI11.hpp>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "lcris/baselines.hpp"
#include "lcris/harness.hpp"

namespace fs = std::filesystem;
using namespace lcris;

namespace {

// "A..B" (inclusive) or a comma-separated list.
std::vector<uint64_t> parse_seeds(const std::string& spec) {
  std::vector<uint64_t> seeds;
  auto parse_one = [](const std::string& s) {
    uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
      throw ConfigError("bad seed: '" + s + "'");
    return v;
  };
  if (const auto dots = spec.find(".."); dots != std::string::npos) {
    const uint64_t a = parse_one(spec.substr(0, dots));
    const uint64_t b = parse_one(spec.substr(dots + 2));
    if (b < a) throw ConfigError("seed range must be A..B with A <= B");
    for (uint64_t s = a; s <= b; ++s) seeds.push_back(s);
    return seeds;
  }
  size_t pos = 0;
  while (pos <= spec.size()) {
    const size_t comma = std::min(spec.find(',', pos), spec.size());
    seeds.push_back(parse_one(spec.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return seeds;
}

harness::ExperimentConfig load_config(const std::string& path) {
  harness::ExperimentConfig cfg =
      path.empty() ? harness::ExperimentConfig{}
                   : harness::ExperimentConfig::from_file(path);
  cfg.validate();
  return cfg;
}

void apply_overrides(harness::ExperimentConfig& cfg, const std::string& seeds_spec,
                     long seed, const std::string& out,
                     const std::string& checkpoint) {
  if (!seeds_spec.empty()) cfg.seeds = parse_seeds(seeds_spec);
  if (seed >= 0) cfg.seeds = {static_cast<uint64_t>(seed)};
  if (!out.empty()) cfg.out_dir = out;
  if (!checkpoint.empty()) cfg.checkpoint = checkpoint;
}

int cmd_train(const harness::ExperimentConfig& cfg) {
  const std::string ckpt_path =
      cfg.checkpoint.empty() ? (fs::path(cfg.out_dir) / "checkpoint.bin").string()
                             : cfg.checkpoint;
  const uint64_t seed = cfg.seeds.front();

  env::RisEnv env = cfg.make_env(cfg.ddpg.steps_per_episode);
  std::unique_ptr<agent::DdpgAgent> ag;
  std::unique_ptr<agent::ReplayBuffer> buffer;
  long start_episode = 0;
  if (fs::exists(ckpt_path)) {
    auto loaded = agent::load_checkpoint(ckpt_path);
    ag = std::move(loaded.agent);
    buffer = std::move(loaded.buffer);
    start_episode = loaded.episode;
    std::cerr << "resuming from " << ckpt_path << " at episode " << start_episode
              << "\n";
  } else {
    ag = std::make_unique<agent::DdpgAgent>(env.state_dim(), env.action_dim(),
                                            cfg.ddpg, seed);
  }
  if (!buffer)
    buffer = std::make_unique<agent::ReplayBuffer>(
        static_cast<size_t>(cfg.ddpg.buffer_capacity));

  fs::create_directories(cfg.out_dir);
  std::ofstream log(fs::path(cfg.out_dir) / "train_rewards.csv");
  log << "episode,reward\n";
  const agent::TrainResult result =
      agent::train(env, *ag, *buffer, seed, start_episode, [&](int ep, double r) {
        log << ep << "," << r << "\n";
        log.flush();
        std::cerr << "episode " << ep << " reward " << r << "\n";
      });

  agent::save_checkpoint(ckpt_path, *ag, buffer.get(), start_episode + cfg.ddpg.episodes);
  std::ofstream manifest(fs::path(cfg.out_dir) / "manifest.txt");
  manifest << "config_hash " << cfg.hash() << "\n"
           << "checkpoint " << ckpt_path << "\n"
           << "train_seed " << seed << "\n"
           << "total_steps " << result.total_steps << "\n";
  return 0;
}

int cmd_eval(const harness::ExperimentConfig& cfg, const std::string& controller,
             const std::string& format) {
  const harness::EvalResult res = harness::run_eval(cfg, controller, cfg.seeds);
  harness::emit_outputs(cfg, res, cfg.out_dir, format);
  std::cout << "wrote " << res.rows.size() << " rows to " << cfg.out_dir << "\n";
  return 0;
}

int cmd_baseline(const harness::ExperimentConfig& cfg, const std::string& controller,
                 const std::string& format) {
  std::vector<std::string> controllers;
  if (controller.empty() || controller == "both")
    controllers = {"optimal", "realistic"};
  else if (controller == "optimal" || controller == "realistic")
    controllers = {controller};
  else
    throw ConfigError("baseline controller must be optimal, realistic or both");

  harness::EvalResult merged;
  for (const auto& ctrl : controllers) {
    harness::EvalResult res = harness::run_eval(cfg, ctrl, cfg.seeds);
    merged.rows.insert(merged.rows.end(), std::make_move_iterator(res.rows.begin()),
                       std::make_move_iterator(res.rows.end()));
  }
  merged.aggregates = harness::aggregate_rows(cfg, merged.rows);
  harness::emit_outputs(cfg, merged, cfg.out_dir, format);
  std::cout << "wrote " << merged.rows.size() << " rows to " << cfg.out_dir << "\n";
  return 0;
}

int cmd_sweep(const harness::ExperimentConfig& cfg, const std::string& axis) {
  const std::vector<harness::SweepRow> table = harness::run_sweep(cfg, axis);
  fs::create_directories(cfg.out_dir);
  const fs::path path = fs::path(cfg.out_dir) / ("sweep_" + axis + ".csv");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << harness::sweep_to_csv(table);
  std::cout << "wrote " << table.size() << " rows to " << path.string() << "\n";
  return 0;
}

int cmd_report(const harness::ExperimentConfig& cfg, const std::string& in_path,
               const std::string& format) {
  std::ifstream in(in_path);
  if (!in) throw ConfigError("cannot read " + in_path);
  harness::EvalResult res;
  res.rows = metrics::parse_csv(in);
  res.aggregates = harness::aggregate_rows(cfg, res.rows);
  harness::emit_outputs(cfg, res, cfg.out_dir, format);
  std::cout << "wrote " << res.aggregates.size() << " aggregate rows to "
            << cfg.out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"liquid-crystal RIS downlink simulator"};
  app.require_subcommand(1);

  std::string config_path, controller, checkpoint, out, seeds_spec;
  std::string format = "csv", axis = "speed", in_path;
  long seed = -1;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "experiment config file");
    sub->add_option("--seed", seed, "single run seed (overrides run.seeds)");
    sub->add_option("--seeds", seeds_spec, "seed range A..B or comma list");
    sub->add_option("--out", out, "output directory");
    sub->add_option("--checkpoint", checkpoint, "policy checkpoint path");
  };

  CLI::App* train = app.add_subcommand("train", "train the phase controller");
  add_common(train);

  CLI::App* eval = app.add_subcommand("eval", "evaluate a controller");
  add_common(eval);
  eval->add_option("--controller", controller, "ddpg | optimal | realistic")
      ->default_val("ddpg");
  eval->add_option("--format", format, "csv | plotdata");

  CLI::App* baseline = app.add_subcommand("baseline", "run the non-learning baselines");
  add_common(baseline);
  baseline->add_option("--controller", controller, "optimal | realistic | both");
  baseline->add_option("--format", format, "csv | plotdata");

  CLI::App* sweep = app.add_subcommand("sweep", "compare controllers across a sweep axis");
  add_common(sweep);
  sweep->add_option("--axis", axis, "speed | beta");

  CLI::App* report = app.add_subcommand("report", "re-aggregate an existing metrics file");
  add_common(report);
  report->add_option("--in", in_path, "metrics.csv to aggregate")->required();
  report->add_option("--format", format, "csv | plotdata");

  CLI11_PARSE(app, argc, argv);

  try {
    harness::ExperimentConfig cfg = load_config(config_path);
    apply_overrides(cfg, seeds_spec, seed, out, checkpoint);
    cfg.validate();

    if (train->parsed()) return cmd_train(cfg);
    if (eval->parsed()) return cmd_eval(cfg, controller, format);
    if (baseline->parsed()) return cmd_baseline(cfg, controller, format);
    if (sweep->parsed()) return cmd_sweep(cfg, axis);
    if (report->parsed()) return cmd_report(cfg, in_path, format);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ConstraintViolation& e) {
    std::cerr << "constraint violation: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
