#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>

#include "lcris/lc_dynamics.hpp"
#include "lcris/metrics.hpp"
#include "lcris/scene.hpp"

namespace lcris::env {

struct LinkBudget {
  double pt_w = 1000.0;       // 30 dBW
  double noise_w = 1e-13;     // -130 dBW
  double bandwidth_hz = 2e8;  // 200 MHz

  void validate() const {
    if (!(pt_w > 0.0) || !(noise_w > 0.0) || !(bandwidth_hz > 0.0))
      throw ConfigError("link budget values must be > 0");
  }
};

enum class SnrScale { Db, Linear };
enum class TimeScale { Ms, S };

// r = beta1 * SNR + beta2 * t_k, with the unit scales chosen so both terms
// are O(10): SNR in dB and t_k in ms by default.
struct RewardConfig {
  double beta1 = 0.2;
  double beta2 = 0.8;
  SnrScale snr_scale = SnrScale::Db;
  TimeScale time_scale = TimeScale::Ms;

  void validate() const {
    if (beta1 < 0.0 || beta2 < 0.0) throw ConfigError("reward weights must be >= 0");
  }
};

struct EnvOptions {
  bool reduced_state = false;  // column-aggregated channels in the observation
};

// Per-element phases that co-phase every RIS path with the direct path.
Eigen::VectorXd optimal_phases(const channel::LinkChannel& h_au,
                               const channel::LinkChannel& h_ar,
                               const channel::LinkChannel& h_ru);

// Circular mean of each column's phases, wrapped to [0, 2pi).
Eigen::VectorXd reduce_to_columns(const Eigen::VectorXd& element_phases,
                                  const channel::ArraySpec& spec);

// Replicate each column phase across its rows.
Eigen::VectorXd expand_columns(const Eigen::VectorXd& column_phases,
                               const channel::ArraySpec& spec);

// Affine map of raw values in [-1, 1] onto the feasible (slot-reachable,
// interior-clamped) phase interval per column. Out-of-range raws saturate.
Eigen::VectorXd map_action(const Eigen::VectorXd& raw, const lc::PanelState& panel);

// Inverse of map_action for a feasible (or clipped-to-feasible) target.
Eigen::VectorXd unmap_action(const Eigen::VectorXd& targets, const lc::PanelState& panel);

struct StepResult {
  Eigen::VectorXd state;
  double reward = 0.0;
  metrics::MetricRow row;
  bool done = false;
};

// The MDP: observations from snapshots, phase actions through the LC panel,
// shaped rewards. Single-threaded and stateful; one instance per episode
// worker.
class RisEnv {
 public:
  RisEnv(scene::SceneConfig scene_cfg, channel::ArraySpec spec,
         scene::ChannelParams params, lc::LcTimeConstants tau, double omega_max,
         LinkBudget budget, RewardConfig reward, EnvOptions opts, int episode_steps);

  Eigen::VectorXd reset(uint64_t seed);
  StepResult step(const Eigen::VectorXd& raw_action);

  int state_dim() const;
  int action_dim() const { return spec_.ny; }
  int episode_steps() const { return episode_steps_; }
  const lc::PanelState& panel() const { return panel_; }
  const scene::Snapshot& snapshot() const { return snap_; }
  const channel::ArraySpec& array() const { return spec_; }
  const LinkBudget& budget() const { return budget_; }

 private:
  Eigen::VectorXd build_state();
  double normalize_block(Eigen::Ref<const Eigen::VectorXcd> h, double& rms, bool init);

  scene::SceneConfig scene_cfg_;
  channel::ArraySpec spec_;
  scene::ChannelParams params_;
  LinkBudget budget_;
  RewardConfig reward_;
  EnvOptions opts_;
  int episode_steps_;

  std::optional<scene::SnapshotStream> stream_;
  scene::Snapshot snap_;
  lc::PanelState panel_;
  Rng init_rng_{0};
  double room_diag_ = 1.0;
  double rms_au_ = 1.0, rms_ar_ = 1.0, rms_ru_ = 1.0;
  bool rms_init_ = false;
  Eigen::VectorXd last_state_;
};

}  // namespace lcris::env
