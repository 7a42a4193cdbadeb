#include "lcris/env.hpp"

#include <cmath>
#include <iostream>

namespace lcris::env {

Eigen::VectorXd optimal_phases(const channel::LinkChannel& h_au,
                               const channel::LinkChannel& h_ar,
                               const channel::LinkChannel& h_ru) {
  const auto n = h_ar.h.size();
  if (h_ru.h.size() != n) throw std::domain_error("optimal_phases: length mismatch");
  // std::arg(0) == 0, which anchors the global-phase degeneracy at h_au = 0.
  const double arg_au = h_au.h.size() > 0 ? std::arg(h_au.h[0]) : 0.0;
  Eigen::VectorXd w(n);
  for (Eigen::Index i = 0; i < n; ++i)
    w[i] = wrap_two_pi(arg_au - std::arg(h_ar.h[i] * h_ru.h[i]));
  return w;
}

Eigen::VectorXd reduce_to_columns(const Eigen::VectorXd& element_phases,
                                  const channel::ArraySpec& spec) {
  if (element_phases.size() != spec.size())
    throw std::domain_error("reduce_to_columns: length mismatch");
  Eigen::VectorXd cols(spec.ny);
  for (int c = 0; c < spec.ny; ++c) {
    double s = 0.0, co = 0.0;
    for (int k = 0; k < spec.nz; ++k) {
      const double w = element_phases[k * spec.ny + c];
      s += std::sin(w);
      co += std::cos(w);
    }
    const double resultant = std::hypot(s, co);
    if (resultant < 1e-12) {
      std::cerr << "lcris: degenerate circular mean in column " << c
                << ", tie-break to 0\n";
      cols[c] = 0.0;
    } else {
      cols[c] = wrap_two_pi(std::atan2(s, co));
    }
  }
  return cols;
}

Eigen::VectorXd expand_columns(const Eigen::VectorXd& column_phases,
                               const channel::ArraySpec& spec) {
  if (column_phases.size() != spec.ny)
    throw std::domain_error("expand_columns: length mismatch");
  Eigen::VectorXd w(spec.size());
  for (int k = 0; k < spec.nz; ++k)
    for (int c = 0; c < spec.ny; ++c) w[k * spec.ny + c] = column_phases[c];
  return w;
}

namespace {

lc::PhaseBounds feasible_bounds(const lc::PanelState& panel) {
  lc::PhaseBounds b = lc::reachable_bounds(panel, panel.slot_duration);
  for (int n = 0; n < panel.columns(); ++n) {
    b.lo[n] = std::max(b.lo[n], lc::kPhaseEpsilon);
    b.hi[n] = std::min(b.hi[n], panel.omega_max - lc::kPhaseEpsilon);
  }
  return b;
}

}  // namespace

Eigen::VectorXd map_action(const Eigen::VectorXd& raw, const lc::PanelState& panel) {
  if (raw.size() != panel.phases.size())
    throw std::domain_error("map_action: action length mismatch");
  const lc::PhaseBounds b = feasible_bounds(panel);
  Eigen::VectorXd targets(raw.size());
  for (Eigen::Index n = 0; n < raw.size(); ++n) {
    const double r = std::clamp(raw[n], -1.0, 1.0);
    targets[n] = b.lo[n] + 0.5 * (r + 1.0) * (b.hi[n] - b.lo[n]);
  }
  return targets;
}

Eigen::VectorXd unmap_action(const Eigen::VectorXd& targets, const lc::PanelState& panel) {
  if (targets.size() != panel.phases.size())
    throw std::domain_error("unmap_action: target length mismatch");
  const lc::PhaseBounds b = feasible_bounds(panel);
  Eigen::VectorXd raw(targets.size());
  for (Eigen::Index n = 0; n < targets.size(); ++n) {
    const double span = b.hi[n] - b.lo[n];
    const double r = span > 0.0 ? 2.0 * (targets[n] - b.lo[n]) / span - 1.0 : 0.0;
    raw[n] = std::clamp(r, -1.0, 1.0);
  }
  return raw;
}

RisEnv::RisEnv(scene::SceneConfig scene_cfg, channel::ArraySpec spec,
               scene::ChannelParams params, lc::LcTimeConstants tau, double omega_max,
               LinkBudget budget, RewardConfig reward, EnvOptions opts,
               int episode_steps)
    : scene_cfg_(std::move(scene_cfg)),
      spec_(spec),
      params_(params),
      budget_(budget),
      reward_(reward),
      opts_(opts),
      episode_steps_(episode_steps) {
  budget_.validate();
  reward_.validate();
  panel_.phases = Eigen::VectorXd::Zero(spec_.ny);
  panel_.omega_max = omega_max;
  panel_.tau = tau;
  panel_.slot_duration = scene_cfg_.slot_duration;
  room_diag_ = scene_cfg_.room.norm();
}

int RisEnv::state_dim() const {
  const int nch = opts_.reduced_state ? spec_.ny : spec_.size();
  return spec_.ny + spec_.ny + 2 + 2 + 2 * nch + 2 * nch;
}

double RisEnv::normalize_block(Eigen::Ref<const Eigen::VectorXcd> h, double& rms,
                               bool init) {
  const double ms = h.squaredNorm() / static_cast<double>(h.size());
  const double target = std::sqrt(ms);
  if (!init) {
    rms = target > 0.0 ? target : 1.0;
  } else {
    const double blended = std::sqrt(0.99 * rms * rms + 0.01 * ms);
    rms = blended > 0.0 ? blended : rms;
  }
  return rms;
}

Eigen::VectorXd RisEnv::build_state() {
  const int nch = opts_.reduced_state ? spec_.ny : spec_.size();
  Eigen::VectorXd s(state_dim());

  Eigen::VectorXcd ar = snap_.prev_ar.h;
  Eigen::VectorXcd ru = snap_.prev_ru.h;
  if (opts_.reduced_state) {
    // Per-column complex mean keeps the aggregate steering information.
    Eigen::VectorXcd arc(spec_.ny), ruc(spec_.ny);
    for (int c = 0; c < spec_.ny; ++c) {
      std::complex<double> a(0, 0), r(0, 0);
      for (int k = 0; k < spec_.nz; ++k) {
        a += ar[k * spec_.ny + c];
        r += ru[k * spec_.ny + c];
      }
      arc[c] = a / static_cast<double>(spec_.nz);
      ruc[c] = r / static_cast<double>(spec_.nz);
    }
    ar = arc;
    ru = ruc;
  }

  const double n_au = normalize_block(snap_.prev_au.h, rms_au_, rms_init_);
  const double n_ar = normalize_block(ar, rms_ar_, rms_init_);
  const double n_ru = normalize_block(ru, rms_ru_, rms_init_);
  rms_init_ = true;

  const Eigen::VectorXd w_opt = reduce_to_columns(
      optimal_phases(snap_.prev_au, snap_.prev_ar, snap_.prev_ru), spec_);

  int off = 0;
  s.segment(off, spec_.ny) = panel_.phases / kTwoPi;
  off += spec_.ny;
  s.segment(off, spec_.ny) = w_opt / kTwoPi;
  off += spec_.ny;
  s[off++] = snap_.prev_d_au / room_diag_;
  s[off++] = snap_.prev_d_ru / room_diag_;
  s[off++] = snap_.prev_au.h[0].real() / n_au;
  s[off++] = snap_.prev_au.h[0].imag() / n_au;
  s.segment(off, nch) = ar.real() / n_ar;
  off += nch;
  s.segment(off, nch) = ar.imag() / n_ar;
  off += nch;
  s.segment(off, nch) = ru.real() / n_ru;
  off += nch;
  s.segment(off, nch) = ru.imag() / n_ru;
  off += nch;
  return s;
}

Eigen::VectorXd RisEnv::reset(uint64_t seed) {
  stream_.emplace(scene_cfg_, spec_, params_, episode_steps_, seed);
  init_rng_.seed(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> phase(lc::kPhaseEpsilon,
                                               panel_.omega_max - lc::kPhaseEpsilon);
  for (int n = 0; n < panel_.columns(); ++n) panel_.phases[n] = phase(init_rng_);
  rms_init_ = false;
  snap_ = stream_->next();
  last_state_ = build_state();
  return last_state_;
}

StepResult RisEnv::step(const Eigen::VectorXd& raw_action) {
  if (!stream_) throw std::logic_error("RisEnv::step before reset");

  const Eigen::VectorXd targets = map_action(raw_action, panel_);
  const lc::SlotTiming timing = lc::panel_config_time(panel_, targets);
  panel_.phases = targets;

  const Eigen::VectorXd element_phases = expand_columns(targets, spec_);
  const std::complex<double> h_eff =
      channel::effective_channel(snap_.h_ar, snap_.h_ru, element_phases, spec_);
  const std::complex<double> h_au = snap_.h_au.h[0];
  const double snr_lin = channel::snr(h_au, h_eff, budget_.pt_w, budget_.noise_w);
  const double rate = lc::effective_rate(snr_lin, timing, budget_.bandwidth_hz);

  const double snr_db = linear_to_db(std::max(snr_lin, 1e-30));
  const double snr_term = reward_.snr_scale == SnrScale::Db ? snr_db : snr_lin;
  const double tk =
      reward_.time_scale == TimeScale::Ms ? timing.serving_time * 1e3 : timing.serving_time;
  const double reward = reward_.beta1 * snr_term + reward_.beta2 * tk;

  StepResult out;
  out.reward = reward;
  out.row.slot = snap_.slot;
  out.row.angle_deg = snap_.angle_label_deg;
  out.row.p_r_dbw =
      linear_to_db(std::max(budget_.pt_w * std::norm(h_au + h_eff), 1e-300));
  out.row.snr_db = snr_db;
  out.row.t_c_ms = timing.config_time * 1e3;
  out.row.t_k_ms = timing.serving_time * 1e3;
  out.row.rate_mbps = rate / 1e6;
  out.row.controller = "ddpg";

  if (snap_.slot + 1 < episode_steps_) {
    snap_ = stream_->next();
    last_state_ = build_state();
    out.done = false;
  } else {
    out.done = true;
  }
  out.state = last_state_;
  return out;
}

}  // namespace lcris::env
