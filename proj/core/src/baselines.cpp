#include "lcris/baselines.hpp"

#include <algorithm>

namespace lcris::baselines {

ControlDecision optimal_controller(const scene::Snapshot& snap,
                                   const channel::ArraySpec& spec,
                                   double slot_duration, bool per_element) {
  Eigen::VectorXd phases = env::optimal_phases(snap.h_au, snap.h_ar, snap.h_ru);
  if (!per_element)
    phases = env::expand_columns(env::reduce_to_columns(phases, spec), spec);
  ControlDecision d;
  d.element_phases = std::move(phases);
  d.timing = {0.0, slot_duration};
  return d;
}

ControlDecision realistic_controller(const scene::Snapshot& snap,
                                     lc::PanelState& panel,
                                     const channel::ArraySpec& spec) {
  const Eigen::VectorXd targets_raw = env::reduce_to_columns(
      env::optimal_phases(snap.h_au, snap.h_ar, snap.h_ru), spec);
  const double ts = panel.slot_duration;

  Eigen::VectorXd achieved(panel.columns());
  double tc_needed = 0.0;
  for (int n = 0; n < panel.columns(); ++n) {
    const double w0 = panel.phases[n];
    const double wd = lc::clamp_phase(targets_raw[n], panel.omega_max);
    const double t_n = lc::element_config_time(w0, wd, panel.omega_max, panel.tau);
    tc_needed = std::max(tc_needed, t_n);
    if (t_n <= ts) {
      achieved[n] = wd;
    } else {
      const double halt[1] = {ts};
      achieved[n] =
          lc::transition_trajectory(w0, wd, panel.tau, panel.omega_max, halt)[0];
    }
  }

  ControlDecision d;
  d.timing.config_time = std::min(tc_needed, ts);
  d.timing.serving_time = ts - d.timing.config_time;
  d.element_phases = env::expand_columns(achieved, spec);
  panel.phases = achieved;
  return d;
}

}  // namespace lcris::baselines
