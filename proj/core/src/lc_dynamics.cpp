#include "lcris/lc_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lcris::lc {

namespace {

void check_interior(double omega, double omega_max, const char* what) {
  // Small slack for round-trips through the exponential maps.
  constexpr double kTol = 1e-12;
  if (omega < kPhaseEpsilon - kTol || omega > omega_max - kPhaseEpsilon + kTol)
    throw std::domain_error(std::string(what) + ": phase outside clamped interior");
}

}  // namespace

double clamp_phase(double omega, double omega_max) {
  return std::clamp(omega, kPhaseEpsilon, omega_max - kPhaseEpsilon);
}

PhaseBounds reachable_bounds(const PanelState& state, double t) {
  if (t < 0.0) throw std::domain_error("reachable_bounds: negative time budget");
  state.tau.validate();
  const double down = std::exp(-t / state.tau.fall);
  const double up = std::exp(-t / state.tau.rise);
  PhaseBounds b;
  b.lo = state.phases * down;
  b.hi = Eigen::VectorXd::Constant(state.columns(), state.omega_max) +
         (state.phases.array() - state.omega_max).matrix() * up;
  return b;
}

double element_config_time(double omega0, double omega_d, double omega_max,
                           const LcTimeConstants& tau) {
  tau.validate();
  check_interior(omega0, omega_max, "element_config_time");
  check_interior(omega_d, omega_max, "element_config_time");
  if (omega_d > omega0)
    return tau.rise * std::log((omega_max - omega0) / (omega_max - omega_d));
  if (omega_d < omega0) return tau.fall * std::log(omega0 / omega_d);
  return 0.0;  // continuity limit of both branches
}

SlotTiming panel_config_time(const PanelState& state, const Eigen::VectorXd& targets) {
  if (targets.size() != state.phases.size())
    throw std::domain_error("panel_config_time: target length mismatch");
  const PhaseBounds bounds = reachable_bounds(state, state.slot_duration);
  constexpr double kTol = 1e-9;
  double tc = 0.0;
  for (int n = 0; n < state.columns(); ++n) {
    if (targets[n] < bounds.lo[n] - kTol || targets[n] > bounds.hi[n] + kTol)
      throw ConstraintViolation("panel_config_time: target for column " +
                                std::to_string(n) + " outside reachable bounds");
    tc = std::max(tc, element_config_time(state.phases[n], targets[n],
                                          state.omega_max, state.tau));
  }
  SlotTiming timing;
  timing.config_time = std::min(tc, state.slot_duration);
  timing.serving_time = state.slot_duration - timing.config_time;
  return timing;
}

double effective_rate(double snr_linear, const SlotTiming& timing, double bandwidth_hz) {
  if (snr_linear < 0.0) throw std::domain_error("effective_rate: negative SNR");
  if (!(bandwidth_hz > 0.0)) throw std::domain_error("effective_rate: bandwidth must be > 0");
  const double ts = timing.config_time + timing.serving_time;
  return (timing.serving_time / ts) * bandwidth_hz * std::log2(1.0 + snr_linear);
}

Eigen::VectorXd transition_trajectory(double omega0, double omega_d,
                                      const LcTimeConstants& tau, double omega_max,
                                      std::span<const double> times) {
  tau.validate();
  check_interior(omega0, omega_max, "transition_trajectory");
  check_interior(omega_d, omega_max, "transition_trajectory");
  Eigen::VectorXd out(static_cast<Eigen::Index>(times.size()));
  for (size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    double w;
    if (omega_d > omega0) {
      w = omega_max + (omega0 - omega_max) * std::exp(-t / tau.rise);
      w = std::min(w, omega_d);
    } else if (omega_d < omega0) {
      w = omega0 * std::exp(-t / tau.fall);
      w = std::max(w, omega_d);
    } else {
      w = omega0;
    }
    out[static_cast<Eigen::Index>(i)] = w;
  }
  return out;
}

}  // namespace lcris::lc
