#pragma once

#include <cstdint>
#include <functional>

#include "affordlab/env/trajectory.hpp"
#include "affordlab/env/widget_env.hpp"
#include "affordlab/label/classifier.hpp"
#include "affordlab/learn/agent.hpp"

namespace affordlab::label {

struct ProbeResult {
  AffordanceDistribution distribution;  // fraction of rollouts per predicted label
  double success_rate = 0.0;
  int rollouts = 0;
};

// Produces one recorded episode from a freshly reset environment.
using RolloutFn = std::function<env::Trajectory(env::WidgetEnv& env, int index)>;

// Runs `n_rollouts` episodes on widgets of `kind`, classifies each motion and
// reports the label frequencies and the success fraction. Widgets are drawn
// from a stream seeded by `seed`. Throws std::invalid_argument when
// n_rollouts < 1.
ProbeResult probe_with(const RolloutFn& rollout, const env::EnvConfig& env_config,
                       sim::WidgetKind kind, int n_rollouts, const ClassifierParams& classifier,
                       std::uint64_t seed);

// Probe with the agent's stochastic policy. The agent is only read.
ProbeResult probe_affordance(const learn::Agent& agent, const env::EnvConfig& env_config,
                             sim::WidgetKind kind, int n_rollouts,
                             const ClassifierParams& classifier, std::uint64_t seed);

}  // namespace affordlab::label
