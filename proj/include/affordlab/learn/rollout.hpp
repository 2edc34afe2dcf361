#pragma once

#include <cstdint>
#include <optional>

#include "affordlab/env/trajectory.hpp"
#include "affordlab/env/widget_env.hpp"
#include "affordlab/learn/agent.hpp"

namespace affordlab::learn {

struct EpisodeResult {
  bool success = false;
  int steps = 0;
  double discounted_return = 0.0;
  env::Trajectory trajectory;  // filled only when recording
};

env::MotionSample motion_sample(const env::WidgetEnv& env);

// Runs the agent from the environment's current (freshly reset) state until
// the episode ends. A null policy_rng selects the deterministic mean action.
EpisodeResult run_episode(const Agent& agent, env::WidgetEnv& env, Rng* policy_rng,
                          bool record, std::uint64_t episode_id = 0);

// Fraction of `episodes` mean-action episodes on `kind` that trigger the
// widget. Widgets are drawn from a stream seeded by `seed`, so repeated calls
// with the same seed see the same widgets.
double evaluate_success(const Agent& agent, const env::EnvConfig& env_config,
                        sim::WidgetKind kind, int episodes, std::uint64_t seed);

}  // namespace affordlab::learn
