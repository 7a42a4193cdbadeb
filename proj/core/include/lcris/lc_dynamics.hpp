#pragma once

#include <Eigen/Dense>
#include <span>
#include <utility>

#include "lcris/common.hpp"

namespace lcris::lc {

// Config times diverge at the interval ends; all phases live in
// [kPhaseEpsilon, omega_max - kPhaseEpsilon].
inline constexpr double kPhaseEpsilon = 1e-3;

// Director reorientation time constants (seconds).
struct LcTimeConstants {
  double fall = 0.029;  // decay toward 0
  double rise = 0.009;  // rise toward omega_max

  void validate() const {
    if (!(fall > 0.0) || !(rise > 0.0))
      throw ConfigError("LC time constants must be > 0");
  }
};

struct SlotTiming {
  double config_time = 0.0;   // t_c, s
  double serving_time = 0.0;  // t_k = t_s - t_c, s
};

// Per-column LC phases plus panel constants.
struct PanelState {
  Eigen::VectorXd phases;  // rad, clamped interior
  double omega_max = kTwoPi;
  LcTimeConstants tau;
  double slot_duration = 0.010;  // t_s, s

  int columns() const { return static_cast<int>(phases.size()); }
};

struct PhaseBounds {
  Eigen::VectorXd lo;  // omega_min per column
  Eigen::VectorXd hi;  // omega_max per column
};

double clamp_phase(double omega, double omega_max);

// Phase interval reachable from the current state within time budget t.
PhaseBounds reachable_bounds(const PanelState& state, double t);

// Closed-form transition time between two interior phases.
double element_config_time(double omega0, double omega_d, double omega_max,
                           const LcTimeConstants& tau);

// t_c = max_n element time; throws ConstraintViolation (naming the column)
// if a target is outside reachable_bounds(state, t_s).
SlotTiming panel_config_time(const PanelState& state, const Eigen::VectorXd& targets);

// (t_k / t_s) * B * log2(1 + snr).
double effective_rate(double snr_linear, const SlotTiming& timing, double bandwidth_hz);

// Exponential relaxation from omega0 toward omega_d, held at omega_d once
// reached. Numerical counterpart of the closed-form config time; used by
// tests and by the Realistic baseline's truncation.
Eigen::VectorXd transition_trajectory(double omega0, double omega_d,
                                      const LcTimeConstants& tau, double omega_max,
                                      std::span<const double> times);

}  // namespace lcris::lc
