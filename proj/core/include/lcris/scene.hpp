#pragma once

#include <Eigen/Dense>
#include <vector>

#include "lcris/channel.hpp"
#include "lcris/common.hpp"

namespace lcris::scene {

// Per-link Rician parameters and NLoS statistics.
struct ChannelParams {
  double k_au = 0.0;
  double k_ar = 20.0;
  double k_ru = 20.0;
  double sigma2_nlos = 1.0;     // RIS-side links
  double sigma2_nlos_au = 1.0;  // direct link (blocked LoS)
  double nlos_corr = 0.0;       // Gauss-Markov slot-to-slot correlation

  void validate() const;
};

// Indoor geometry: static AP and RIS, user waypoints on an arc around the RIS.
struct SceneConfig {
  Eigen::Vector3d room{63.0, 36.0, 3.0};
  double node_height = 2.0;
  Eigen::Vector3d ap_pos{5.9, 18.0, 2.0};   // d_{A-R} = 34.1 m to the RIS
  Eigen::Vector3d ris_pos{40.0, 18.0, 2.0};
  std::vector<double> waypoint_angles_deg{-60, -50, -40, -30, -20, 20, 30, 40, 50, 60};
  double waypoint_radius = 12.0;  // m from the RIS
  double speed = 1.5;             // m/s
  double slot_duration = 0.010;   // s

  void validate() const;
  // RIS broadside (unit, horizontal, pointing at the AP) and its lateral axis.
  Eigen::Vector3d broadside() const;
  Eigen::Vector3d lateral() const;
  Eigen::Vector3d waypoint(int k) const;
};

struct Trajectory {
  std::vector<Eigen::Vector3d> positions;
  std::vector<double> angle_label_deg;  // nearest waypoint per slot
  std::vector<int> pass_index;          // ping-pong traversal counter
};

// Piecewise-linear walk through the waypoints at constant speed,
// reversing direction at the ends (ping-pong) until `steps` slots exist.
Trajectory build_trajectory(const SceneConfig& cfg, int steps);

// One slot: geometry and channels for slot i plus the previous slot's
// channels and distances (the outdated CSI available to the agent).
struct Snapshot {
  int slot = 0;
  double angle_label_deg = 0.0;
  channel::LinkGeometry geo_au, geo_ar, geo_ru;
  channel::LinkChannel h_au, h_ar, h_ru;
  channel::LinkChannel prev_au, prev_ar, prev_ru;
  double prev_d_au = 0.0, prev_d_ru = 0.0;
};

// Sequential per-episode snapshot generator (caches the previous slot).
class SnapshotStream {
 public:
  SnapshotStream(SceneConfig cfg, channel::ArraySpec spec, ChannelParams params,
                 int steps, uint64_t seed);

  bool done() const { return index_ >= steps_; }
  int steps() const { return steps_; }
  Snapshot next();

  const Trajectory& trajectory() const { return traj_; }
  const channel::ArraySpec& array() const { return spec_; }

 private:
  channel::LinkChannel make_channel(const channel::LinkGeometry& geom,
                                    const channel::LinkChannel* prev);

  SceneConfig cfg_;
  channel::ArraySpec spec_;
  ChannelParams params_;
  Trajectory traj_;
  int steps_ = 0;
  int index_ = 0;
  Rng rng_;
  Snapshot prev_;
};

}  // namespace lcris::scene
