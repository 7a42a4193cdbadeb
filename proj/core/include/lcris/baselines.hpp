#pragma once

#include "lcris/env.hpp"

namespace lcris::baselines {

struct ControlDecision {
  Eigen::VectorXd element_phases;  // what the panel actually shows this slot
  lc::SlotTiming timing;
};

// Instantaneous, unconstrained co-phasing on current-slot (perfect) CSI.
// t_c = 0, t_k = t_s. `per_element` false restricts it column-wise.
ControlDecision optimal_controller(const scene::Snapshot& snap,
                                   const channel::ArraySpec& spec,
                                   double slot_duration, bool per_element = true);

// Steers column-wise toward the optimal phases but halts at t_s; achieved
// phases follow the relaxation trajectory. Updates `panel` in place.
ControlDecision realistic_controller(const scene::Snapshot& snap,
                                     lc::PanelState& panel,
                                     const channel::ArraySpec& spec);

}  // namespace lcris::baselines
