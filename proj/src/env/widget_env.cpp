#include "affordlab/env/widget_env.hpp"

#include <stdexcept>

namespace affordlab::env {

void EnvConfig::validate() const {
  arm.validate();
  contact.validate();
  if (horizon <= 0) throw std::invalid_argument("horizon must be positive");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(discount > 0.0 && discount < 1.0)) {
    throw std::invalid_argument("discount must lie in (0, 1)");
  }
  if (reward.distance_factor < 0.0 || reward.movement_factor < 0.0) {
    throw std::invalid_argument("reward factors must be non-negative");
  }
  if (!(placement.side > 0.0)) throw std::invalid_argument("placement side must be positive");
}

WidgetEnv::WidgetEnv(EnvConfig config, std::uint64_t seed)
    : config_(std::move(config)), rng_(seed) {
  config_.validate();
}

Observation WidgetEnv::reset(const EpisodeConfig& episode) {
  rng_ = Rng(episode.rng_seed);
  return reset(episode.widget_kind);
}

Observation WidgetEnv::reset(sim::WidgetKind kind) {
  return reset(sample_widget(kind, config_.placement, config_.widgets, rng_));
}

Observation WidgetEnv::reset(const sim::WidgetSpec& spec) {
  spec.validate();
  spec_ = spec;
  widget_ = {};
  arm_ = {};
  arm_.angles = config_.arm.rest_angles;
  steps_ = 0;
  done_ = false;
  active_ = true;
  return observe();
}

Observation WidgetEnv::observe() const { return make_observation(arm_, spec_, widget_); }

sim::Vec3 WidgetEnv::fingertip_mid() const {
  return sim::forward_kinematics(config_.arm, arm_.angles).fingertip_mid;
}

StepOutcome WidgetEnv::step(const sim::JointVector& action) {
  if (!active_) throw std::logic_error("WidgetEnv::step called before reset");
  if (done_) throw std::logic_error("WidgetEnv::step called after the episode ended");
  if (!action.allFinite()) throw std::invalid_argument("WidgetEnv::step: non-finite action");

  StepOutcome out;
  const double limit = config_.arm.max_force;
  const sim::JointVector forces = action.cwiseMax(-limit).cwiseMin(limit);
  out.action_clamped = (forces.array() != action.array()).any();

  const bool was_triggered = widget_.triggered;
  sim::StepResult next = sim::step_dynamics(config_.arm, config_.contact, arm_, spec_, widget_,
                                            forces, config_.dt);
  arm_ = next.arm;
  widget_ = next.widget;
  ++steps_;

  out.reward = compute_reward(config_.reward, next.contact, arm_, widget_, spec_, was_triggered);
  out.contact = next.contact;
  out.success = widget_.triggered;
  out.truncated = !widget_.triggered && steps_ >= config_.horizon;
  out.done = widget_.triggered || steps_ >= config_.horizon;
  done_ = out.done;
  out.observation = observe();
  return out;
}

}  // namespace affordlab::env
