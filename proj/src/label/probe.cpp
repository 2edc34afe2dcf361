#include "affordlab/label/probe.hpp"

#include <stdexcept>

#include "affordlab/label/features.hpp"
#include "affordlab/learn/rollout.hpp"

namespace affordlab::label {

ProbeResult probe_with(const RolloutFn& rollout, const env::EnvConfig& env_config,
                       sim::WidgetKind kind, int n_rollouts, const ClassifierParams& classifier,
                       std::uint64_t seed) {
  if (n_rollouts < 1) throw std::invalid_argument("probe needs at least one rollout");
  env::WidgetEnv env(env_config, mix_seed(seed, 0));
  int press = 0;
  int successes = 0;
  for (int i = 0; i < n_rollouts; ++i) {
    env.reset(kind);
    const env::Trajectory traj = rollout(env, i);
    if (traj.success) ++successes;
    if (classify(classifier, featurize(traj)).argmax() == Label::kPress) ++press;
  }
  ProbeResult result;
  result.rollouts = n_rollouts;
  result.distribution.p_press = static_cast<double>(press) / n_rollouts;
  result.distribution.p_slide = static_cast<double>(n_rollouts - press) / n_rollouts;
  result.success_rate = static_cast<double>(successes) / n_rollouts;
  return result;
}

ProbeResult probe_affordance(const learn::Agent& agent, const env::EnvConfig& env_config,
                             sim::WidgetKind kind, int n_rollouts,
                             const ClassifierParams& classifier, std::uint64_t seed) {
  Rng policy_rng(mix_seed(seed, 1));
  auto rollout = [&](env::WidgetEnv& env, int index) {
    return learn::run_episode(agent, env, &policy_rng, true, static_cast<std::uint64_t>(index))
        .trajectory;
  };
  return probe_with(rollout, env_config, kind, n_rollouts, classifier, seed);
}

}  // namespace affordlab::label
