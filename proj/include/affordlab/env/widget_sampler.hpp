#pragma once

#include "affordlab/common/random.hpp"
#include "affordlab/sim/widget.hpp"

namespace affordlab::env {

// Square region of the table over which widget origins are drawn uniformly.
struct PlacementArea {
  double center_x = 0.30;
  double center_y = 0.0;
  double side = 0.05;
};

// Mechanism constants applied to every sampled widget of a kind. Geometry
// ranges are fixed by the widget definitions and are not configurable.
struct WidgetPhysics {
  double button_spring_k = 50.0;
  double button_travel = 0.025;
  double button_damping = 1.0;
  double deceptive_spring_k = 50.0;
  double deceptive_travel = 0.025;
  double deceptive_damping = 1.0;
  double slider_damping = 2.0;
  double handle_mass = 0.05;
  double press_goal = 0.02;
  double slide_goal = 0.04;
};

sim::WidgetSpec sample_widget(sim::WidgetKind kind, const PlacementArea& area,
                              const WidgetPhysics& physics, Rng& rng);

// Builds the widget of `kind` with explicit handle footprint; used by the
// sampler and by tests that need a particular geometry.
sim::WidgetSpec make_widget(sim::WidgetKind kind, double handle_width, double handle_length,
                            const sim::Vec3& origin, const WidgetPhysics& physics);

}  // namespace affordlab::env
