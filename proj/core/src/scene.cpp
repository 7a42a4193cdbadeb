#include "lcris/scene.hpp"

#include <algorithm>
#include <cmath>

namespace lcris::scene {

void ChannelParams::validate() const {
  if (k_au < 0 || k_ar < 0 || k_ru < 0) throw ConfigError("K-factors must be >= 0");
  if (sigma2_nlos < 0 || sigma2_nlos_au < 0)
    throw ConfigError("NLoS variances must be >= 0");
  if (nlos_corr < 0.0 || nlos_corr >= 1.0)
    throw ConfigError("nlos_corr must be in [0, 1)");
}

void SceneConfig::validate() const {
  if (waypoint_angles_deg.empty()) throw ConfigError("no waypoints configured");
  if (!std::is_sorted(waypoint_angles_deg.begin(), waypoint_angles_deg.end(),
                      std::less_equal<>()))
    throw ConfigError("waypoint angles must be strictly increasing");
  if (!(speed > 0.0)) throw ConfigError("user speed must be > 0");
  if (!(slot_duration > 0.0)) throw ConfigError("slot duration must be > 0");
  if (!(waypoint_radius > 0.0)) throw ConfigError("waypoint radius must be > 0");
  auto inside = [&](const Eigen::Vector3d& p) {
    return p.x() >= 0 && p.x() <= room.x() && p.y() >= 0 && p.y() <= room.y() &&
           p.z() >= 0 && p.z() <= room.z();
  };
  if (!inside(ap_pos) || !inside(ris_pos)) throw ConfigError("AP/RIS outside room");
  for (size_t k = 0; k < waypoint_angles_deg.size(); ++k)
    if (!inside(waypoint(static_cast<int>(k))))
      throw ConfigError("waypoint outside room");
}

Eigen::Vector3d SceneConfig::broadside() const {
  Eigen::Vector3d b = ap_pos - ris_pos;
  b.z() = 0.0;
  if (b.norm() == 0.0) throw ConfigError("AP and RIS share a horizontal position");
  return b.normalized();
}

Eigen::Vector3d SceneConfig::lateral() const {
  const Eigen::Vector3d b = broadside();
  return {-b.y(), b.x(), 0.0};
}

Eigen::Vector3d SceneConfig::waypoint(int k) const {
  const double phi = waypoint_angles_deg.at(static_cast<size_t>(k)) * kPi / 180.0;
  Eigen::Vector3d p = ris_pos + waypoint_radius * (std::cos(phi) * broadside() +
                                                   std::sin(phi) * lateral());
  p.z() = node_height;
  return p;
}

Trajectory build_trajectory(const SceneConfig& cfg, int steps) {
  cfg.validate();
  if (steps <= 0) throw ConfigError("episode step count must be > 0");

  const int nw = static_cast<int>(cfg.waypoint_angles_deg.size());
  std::vector<Eigen::Vector3d> wps(nw);
  for (int k = 0; k < nw; ++k) wps[k] = cfg.waypoint(k);

  // Cumulative arc length along the waypoint polyline.
  std::vector<double> arc(nw, 0.0);
  for (int k = 1; k < nw; ++k) arc[k] = arc[k - 1] + (wps[k] - wps[k - 1]).norm();
  const double total = arc.back();

  Trajectory traj;
  traj.positions.reserve(steps);
  traj.angle_label_deg.reserve(steps);
  traj.pass_index.reserve(steps);

  for (int i = 0; i < steps; ++i) {
    double pos;
    int pass = 0;
    if (total == 0.0) {
      pos = 0.0;  // single waypoint: stationary user
    } else {
      const double s = i * cfg.speed * cfg.slot_duration;
      pass = static_cast<int>(s / total);
      const double u = std::fmod(s, 2.0 * total);
      pos = (u <= total) ? u : 2.0 * total - u;
    }
    // Locate the segment containing arc position `pos`.
    int seg = nw - 2;
    for (int k = 1; k < nw; ++k)
      if (pos <= arc[k]) { seg = k - 1; break; }
    Eigen::Vector3d p;
    if (nw == 1) {
      p = wps[0];
    } else {
      const double seg_len = arc[seg + 1] - arc[seg];
      const double f = seg_len > 0.0 ? (pos - arc[seg]) / seg_len : 0.0;
      p = wps[seg] + f * (wps[seg + 1] - wps[seg]);
    }
    int nearest = 0;
    double best = (p - wps[0]).squaredNorm();
    for (int k = 1; k < nw; ++k) {
      const double d2 = (p - wps[k]).squaredNorm();
      if (d2 < best) { best = d2; nearest = k; }
    }
    traj.positions.push_back(p);
    traj.angle_label_deg.push_back(cfg.waypoint_angles_deg[static_cast<size_t>(nearest)]);
    traj.pass_index.push_back(pass);
  }
  return traj;
}

SnapshotStream::SnapshotStream(SceneConfig cfg, channel::ArraySpec spec,
                               ChannelParams params, int steps, uint64_t seed)
    : cfg_(std::move(cfg)), spec_(spec), params_(params), steps_(steps), rng_(seed) {
  params_.validate();
  spec_.validate();
  traj_ = build_trajectory(cfg_, steps);
}

channel::LinkChannel SnapshotStream::make_channel(const channel::LinkGeometry& geom,
                                                  const channel::LinkChannel* prev) {
  const double sigma2 =
      geom.tag == channel::LinkTag::ApUser ? params_.sigma2_nlos_au : params_.sigma2_nlos;
  double k = 0.0;
  switch (geom.tag) {
    case channel::LinkTag::ApUser: k = params_.k_au; break;
    case channel::LinkTag::ApRis: k = params_.k_ar; break;
    case channel::LinkTag::RisUser: k = params_.k_ru; break;
  }
  channel::LinkChannel fresh = channel::build_channel(geom, spec_, k, sigma2, rng_);
  const double rho = params_.nlos_corr;
  if (rho > 0.0 && prev != nullptr && prev->h.size() == fresh.h.size()) {
    // Gauss-Markov blend of the previous slot keeps the marginal variance.
    fresh.h = rho * (fresh.gain / prev->gain) * prev->h +
              std::sqrt(1.0 - rho * rho) * fresh.h;
  }
  return fresh;
}

Snapshot SnapshotStream::next() {
  if (done()) throw std::out_of_range("SnapshotStream: episode exhausted");
  const int i = index_++;
  const Eigen::Vector3d& user = traj_.positions[static_cast<size_t>(i)];
  const Eigen::Vector3d b = cfg_.broadside();
  const Eigen::Vector3d t = cfg_.lateral();

  Snapshot s;
  s.slot = i;
  s.angle_label_deg = traj_.angle_label_deg[static_cast<size_t>(i)];

  s.geo_au = {(user - cfg_.ap_pos).norm(), 0.0, 0.0, channel::LinkTag::ApUser};
  // RIS broadside faces the AP: incident wave at (0, 0).
  s.geo_ar = {(cfg_.ap_pos - cfg_.ris_pos).norm(), 0.0, 0.0, channel::LinkTag::ApRis};

  const Eigen::Vector3d rel = user - cfg_.ris_pos;
  const double horiz = std::hypot(rel.dot(b), rel.dot(t));
  s.geo_ru = {rel.norm(), std::atan2(rel.z(), horiz), std::atan2(rel.dot(t), rel.dot(b)),
              channel::LinkTag::RisUser};

  s.h_au = make_channel(s.geo_au, i > 0 ? &prev_.h_au : nullptr);
  s.h_ar = make_channel(s.geo_ar, i > 0 ? &prev_.h_ar : nullptr);
  s.h_ru = make_channel(s.geo_ru, i > 0 ? &prev_.h_ru : nullptr);

  if (i == 0) {
    s.prev_au = s.h_au;
    s.prev_ar = s.h_ar;
    s.prev_ru = s.h_ru;
    s.prev_d_au = s.geo_au.distance;
    s.prev_d_ru = s.geo_ru.distance;
  } else {
    s.prev_au = prev_.h_au;
    s.prev_ar = prev_.h_ar;
    s.prev_ru = prev_.h_ru;
    s.prev_d_au = prev_.geo_au.distance;
    s.prev_d_ru = prev_.geo_ru.distance;
  }
  prev_ = s;
  return s;
}

}  // namespace lcris::scene
