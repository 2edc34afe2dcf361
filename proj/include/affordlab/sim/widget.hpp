#pragma once

#include <string>
#include <string_view>

#include "affordlab/sim/arm.hpp"

namespace affordlab::sim {

enum class WidgetKind { kButton, kSlider, kDeceptive };
enum class Mechanism { kPress, kSlide };

std::string_view to_string(WidgetKind kind);
// throws std::invalid_argument for unknown names
WidgetKind widget_kind_from_string(std::string_view name);

struct Footprint {
  double width = 0.0;
  double length = 0.0;
};

// Widget frame is world-aligned: width runs along world y (the rail
// direction for sliders), length along world x, height along world z.
// The base lies flat on the table (z = 0) centred on `origin`.
struct WidgetSpec {
  WidgetKind kind = WidgetKind::kButton;
  Mechanism mechanism = Mechanism::kPress;
  Vec3 handle_dims{0.04, 0.04, 0.03};  // (width, length, height)
  Footprint base_dims{0.05, 0.05};
  Vec3 origin = Vec3::Zero();
  // direction of positive displacement: -z for press, +y for slide
  Vec3 travel_axis{0.0, 0.0, -1.0};
  double spring_k = 50.0;          // N/m, press mechanisms only
  double rail_lower = 0.0;         // m
  double rail_upper = 0.025;       // m
  double goal_displacement = 0.02; // m
  double handle_mass = 0.05;       // kg
  double handle_damping = 1.0;     // N s/m
  double end_stop_k = 5.0e4;       // N/m beyond the rail limits

  // handle centre with zero displacement
  Vec3 rest_handle_center() const;
  Vec3 handle_center(double displacement) const;

  // throws std::invalid_argument when geometry or mechanism parameters are inconsistent
  void validate() const;
};

struct WidgetState {
  double displacement = 0.0;
  double velocity = 0.0;
  bool triggered = false;
};

// spring return for press mechanisms; rail end stops for sliders
double widget_restoring_force(const WidgetSpec& spec, const WidgetState& state);

}  // namespace affordlab::sim
