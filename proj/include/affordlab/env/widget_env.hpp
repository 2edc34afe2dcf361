#pragma once

#include <cstdint>
#include <optional>

#include "affordlab/common/random.hpp"
#include "affordlab/env/mdp.hpp"
#include "affordlab/env/widget_sampler.hpp"

namespace affordlab::env {

struct EnvConfig {
  sim::ArmConfig arm;
  sim::ContactConfig contact;
  RewardConfig reward;
  PlacementArea placement;
  WidgetPhysics widgets;
  int horizon = 150;
  double dt = 0.01;
  double discount = 0.99;

  void validate() const;
};

// Per-episode settings for a seeded reset.
struct EpisodeConfig {
  sim::WidgetKind widget_kind = sim::WidgetKind::kButton;
  std::uint64_t rng_seed = 0;
};

struct StepOutcome {
  Observation observation;
  RewardBreakdown reward;
  sim::ContactReport contact;
  bool done = false;
  bool success = false;
  bool truncated = false;
  // set when the requested action exceeded the motor range and was clamped
  bool action_clamped = false;
};

// One widget-interaction episode at a time. Not thread-safe; use one
// instance per rollout worker.
class WidgetEnv {
 public:
  explicit WidgetEnv(EnvConfig config, std::uint64_t seed = 0);

  // reseeds, then samples the widget of the configured kind
  Observation reset(const EpisodeConfig& episode);
  // continues the internal random stream
  Observation reset(sim::WidgetKind kind);
  // fixed widget, e.g. when replaying a stored trajectory
  Observation reset(const sim::WidgetSpec& spec);

  // throws std::logic_error when called before reset or after the episode ended
  StepOutcome step(const sim::JointVector& action);

  const EnvConfig& config() const { return config_; }
  const sim::WidgetSpec& widget_spec() const { return spec_; }
  const sim::WidgetState& widget_state() const { return widget_; }
  const sim::ArmState& arm_state() const { return arm_; }
  int step_count() const { return steps_; }
  bool done() const { return done_; }
  bool active() const { return active_ && !done_; }
  Rng& rng() { return rng_; }
  Observation observe() const;
  sim::Vec3 fingertip_mid() const;

 private:
  EnvConfig config_;
  Rng rng_;
  sim::WidgetSpec spec_;
  sim::WidgetState widget_;
  sim::ArmState arm_;
  int steps_ = 0;
  bool done_ = false;
  bool active_ = false;
};

}  // namespace affordlab::env
