#include "affordlab/env/widget_sampler.hpp"

namespace affordlab::env {

using sim::Mechanism;
using sim::Vec3;
using sim::WidgetKind;
using sim::WidgetSpec;

WidgetSpec make_widget(WidgetKind kind, double handle_width, double handle_length,
                       const Vec3& origin, const WidgetPhysics& physics) {
  WidgetSpec spec;
  spec.kind = kind;
  spec.origin = origin;
  spec.handle_mass = physics.handle_mass;
  switch (kind) {
    case WidgetKind::kButton:
      spec.mechanism = Mechanism::kPress;
      spec.handle_dims = Vec3(handle_width, handle_width, 0.03);
      spec.base_dims = {handle_width + 0.01, handle_width + 0.01};
      spec.spring_k = physics.button_spring_k;
      spec.handle_damping = physics.button_damping;
      spec.rail_upper = physics.button_travel;
      break;
    case WidgetKind::kSlider:
      spec.mechanism = Mechanism::kSlide;
      spec.handle_dims = Vec3(handle_width, handle_length, 0.04);
      spec.base_dims = {handle_width + 0.10, handle_length + 0.01};
      spec.spring_k = 0.0;
      spec.handle_damping = physics.slider_damping;
      break;
    case WidgetKind::kDeceptive:
      // looks like a slider, moves like a button
      spec.mechanism = Mechanism::kPress;
      spec.handle_dims = Vec3(0.025, 0.05, 0.04);
      spec.base_dims = {0.125, 0.06};
      spec.spring_k = physics.deceptive_spring_k;
      spec.handle_damping = physics.deceptive_damping;
      spec.rail_upper = physics.deceptive_travel;
      break;
  }
  if (spec.mechanism == Mechanism::kPress) {
    spec.travel_axis = Vec3(0.0, 0.0, -1.0);
    spec.rail_lower = 0.0;
    spec.goal_displacement = physics.press_goal;
  } else {
    // handle starts mid-rail; success is reached toward +y
    spec.travel_axis = Vec3(0.0, 1.0, 0.0);
    const double half_travel = 0.5 * (spec.base_dims.width - spec.handle_dims.x());
    spec.rail_lower = -half_travel;
    spec.rail_upper = half_travel;
    spec.goal_displacement = physics.slide_goal;
  }
  return spec;
}

WidgetSpec sample_widget(WidgetKind kind, const PlacementArea& area,
                         const WidgetPhysics& physics, Rng& rng) {
  double width = 0.0;
  double length = 0.0;
  if (kind == WidgetKind::kButton) {
    width = rng.uniform(0.03, 0.05);
    length = width;
  } else if (kind == WidgetKind::kSlider) {
    length = rng.uniform(0.04, 0.06);
    width = rng.uniform(0.01, 0.02);
  }
  const double half = 0.5 * area.side;
  const Vec3 origin(area.center_x + rng.uniform(-half, half),
                    area.center_y + rng.uniform(-half, half), 0.0);
  return make_widget(kind, width, length, origin, physics);
}

}  // namespace affordlab::env
