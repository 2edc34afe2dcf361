#pragma once

#include <array>

#include "affordlab/sim/arm.hpp"
#include "affordlab/sim/widget.hpp"

namespace affordlab::sim {

struct ContactConfig {
  double stiffness = 4.0e4;      // N/m, fingertip sphere vs. handle box
  double damping = 20.0;         // N s/m along the contact normal
  double table_stiffness = 4.0e4;
  double table_damping = 20.0;
  // integration substep bound; step_dynamics splits dt accordingly
  double max_substep = 5.0e-4;

  void validate() const;
};

struct ContactReport {
  std::array<Vec3, 2> fingertip_pos;
  // smallest signed distance from a fingertip sphere surface to the handle
  // (negative when penetrating)
  double min_distance = 0.0;
  // total force the handle exerts on the fingertips
  Vec3 contact_force = Vec3::Zero();
  // deepest sphere penetration into the handle across all substeps
  double max_penetration = 0.0;
  bool touching = false;
};

struct StepResult {
  ArmState arm;
  WidgetState widget;
  ContactReport contact;
};

// Signed distance from `point` to the surface of the handle box (negative
// inside) and the outward unit normal at the closest surface point.
struct BoxQuery {
  double distance = 0.0;
  Vec3 normal = Vec3::UnitZ();
};
BoxQuery query_handle_box(const WidgetSpec& spec, double displacement, const Vec3& point);

// Advances arm and widget by dt under the given motor forces. Forces must lie
// within [-max_force, max_force]; any non-finite input throws
// std::invalid_argument before integration starts.
StepResult step_dynamics(const ArmConfig& config, const ContactConfig& contact,
                         const ArmState& arm, const WidgetSpec& spec,
                         const WidgetState& widget, const JointVector& forces,
                         double dt);

// Contact geometry at the current configuration without advancing time.
ContactReport measure_contact(const ArmConfig& config, const ContactConfig& contact,
                              const ArmState& arm, const WidgetSpec& spec,
                              const WidgetState& widget);

}  // namespace affordlab::sim
