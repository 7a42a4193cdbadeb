#pragma once

#include <string>
#include <utility>
#include <vector>

#include "lcris/ddpg.hpp"
#include "lcris/env.hpp"
#include "lcris/scene.hpp"

namespace lcris::harness {

// Whole-experiment configuration. Every default reproduces the reference
// setup, so an empty config file is a valid experiment. The file format is
// `section.key = value` lines, '#' comments; unknown keys are rejected.
struct ExperimentConfig {
  // scene
  scene::SceneConfig scene;

  // channel
  double wavelength = 0.005;     // 60 GHz
  double spacing_factor = 0.45;  // element pitch in wavelengths
  int columns = 30;
  int rows = 25;
  scene::ChannelParams channel;
  double pt_dbw = 30.0;
  double noise_dbw = -130.0;
  double bandwidth_hz = 2e8;

  // lc
  lc::LcTimeConstants tau;  // 29 ms / 9 ms
  double omega_max = kTwoPi;
  double slot_ms = 10.0;

  // reward + env
  env::RewardConfig reward;
  env::EnvOptions env_opts;

  // agent
  agent::DdpgConfig ddpg;

  // run
  std::vector<uint64_t> seeds;  // default 0..349
  int eval_steps = 19328;
  std::string out_dir = "out";
  bool optimal_per_element = true;
  std::string checkpoint;

  // sweep
  std::vector<double> sweep_speeds{1.5, 3.0};
  std::vector<std::pair<double, double>> sweep_betas{{0.2, 0.8}, {0.8, 0.2}};

  ExperimentConfig();

  static ExperimentConfig from_string(const std::string& text);
  static ExperimentConfig from_file(const std::string& path);

  // Derived pieces.
  channel::ArraySpec array_spec() const;
  env::LinkBudget budget() const;
  env::RisEnv make_env(int episode_steps) const;

  // Canonical serialization (sorted keys, lossless doubles) and its hash.
  std::string canonical() const;
  std::string hash() const;

  void validate() const;
};

}  // namespace lcris::harness
