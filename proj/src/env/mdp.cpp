#include "affordlab/env/mdp.hpp"

#include <algorithm>
#include <stdexcept>

namespace affordlab::env {

ObservationVector Observation::to_vector() const {
  ObservationVector v;
  v << angles, velocities, handle_dims, base_width, base_length, handle_center, base_center,
      handle_velocity;
  return v;
}

Observation make_observation(const sim::ArmState& arm, const sim::WidgetSpec& spec,
                             const sim::WidgetState& widget) {
  Observation obs;
  obs.angles = arm.angles;
  obs.velocities = arm.velocities;
  obs.handle_dims = spec.handle_dims;
  obs.base_width = spec.base_dims.width;
  obs.base_length = spec.base_dims.length;
  obs.handle_center = spec.handle_center(widget.displacement);
  obs.base_center = spec.origin;
  obs.handle_velocity = widget.velocity * spec.travel_axis;
  return obs;
}

RewardBreakdown compute_reward(const RewardConfig& config, const sim::ContactReport& contact,
                               const sim::ArmState& arm, const sim::WidgetState& widget,
                               const sim::WidgetSpec& spec, bool already_triggered) {
  RewardBreakdown r;
  const sim::Vec3 mid = 0.5 * (contact.fingertip_pos[0] + contact.fingertip_pos[1]);
  const double dist = (mid - spec.handle_center(widget.displacement)).norm();
  r.distance_penalty = std::clamp(-config.distance_factor * dist, -0.01, 0.0);
  const double mean_speed = arm.velocities.cwiseAbs().mean();
  r.movement_penalty = std::clamp(-config.movement_factor * mean_speed, -0.01, 0.0);
  r.completion = (widget.triggered && !already_triggered) ? 1.0 : 0.0;
  r.total = r.distance_penalty + r.movement_penalty + r.completion;
  return r;
}

double episode_return(std::span<const double> rewards, double discount) {
  if (rewards.empty()) {
    throw std::invalid_argument("episode_return: empty reward sequence");
  }
  double total = 0.0;
  double weight = 1.0;
  for (double r : rewards) {
    total += weight * r;
    weight *= discount;
  }
  return total;
}

}  // namespace affordlab::env
