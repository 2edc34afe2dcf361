#include "affordlab/sim/widget.hpp"

#include <cmath>
#include <stdexcept>

namespace affordlab::sim {

std::string_view to_string(WidgetKind kind) {
  switch (kind) {
    case WidgetKind::kButton: return "button";
    case WidgetKind::kSlider: return "slider";
    case WidgetKind::kDeceptive: return "deceptive";
  }
  return "unknown";
}

WidgetKind widget_kind_from_string(std::string_view name) {
  if (name == "button") return WidgetKind::kButton;
  if (name == "slider") return WidgetKind::kSlider;
  if (name == "deceptive") return WidgetKind::kDeceptive;
  throw std::invalid_argument("unknown widget kind '" + std::string(name) + "'");
}

Vec3 WidgetSpec::rest_handle_center() const {
  return origin + Vec3(0.0, 0.0, 0.5 * handle_dims.z());
}

Vec3 WidgetSpec::handle_center(double displacement) const {
  return rest_handle_center() + displacement * travel_axis;
}

void WidgetSpec::validate() const {
  if (!handle_dims.allFinite() || !origin.allFinite() || !travel_axis.allFinite()) {
    throw std::invalid_argument("widget geometry must be finite");
  }
  if ((handle_dims.array() <= 0.0).any() || !(base_dims.width > 0.0) ||
      !(base_dims.length > 0.0)) {
    throw std::invalid_argument("widget dimensions must be positive");
  }
  if (std::abs(travel_axis.norm() - 1.0) > 1e-12) {
    throw std::invalid_argument("widget travel axis must be a unit vector");
  }
  if (!(rail_lower < rail_upper) || !(goal_displacement > 0.0) ||
      goal_displacement > rail_upper) {
    throw std::invalid_argument("widget goal must lie inside the travel range");
  }
  if (!(handle_mass > 0.0) || handle_damping < 0.0 || spring_k < 0.0) {
    throw std::invalid_argument("widget mechanism parameters out of range");
  }
}

double widget_restoring_force(const WidgetSpec& spec, const WidgetState& state) {
  if (spec.mechanism == Mechanism::kPress) {
    return -spec.spring_k * state.displacement;
  }
  if (state.displacement > spec.rail_upper) {
    return -spec.end_stop_k * (state.displacement - spec.rail_upper);
  }
  if (state.displacement < spec.rail_lower) {
    return -spec.end_stop_k * (state.displacement - spec.rail_lower);
  }
  return 0.0;
}

}  // namespace affordlab::sim
