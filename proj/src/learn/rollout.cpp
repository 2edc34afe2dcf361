#include "affordlab/learn/rollout.hpp"

namespace affordlab::learn {

env::MotionSample motion_sample(const env::WidgetEnv& env) {
  env::MotionSample s;
  s.time = env.step_count() * env.config().dt;
  s.fingertip_mid = env.fingertip_mid();
  s.handle_center = env.widget_spec().handle_center(env.widget_state().displacement);
  s.displacement = env.widget_state().displacement;
  s.joint_velocities = env.arm_state().velocities;
  return s;
}

EpisodeResult run_episode(const Agent& agent, env::WidgetEnv& env, Rng* policy_rng,
                          bool record, std::uint64_t episode_id) {
  EpisodeResult result;
  if (record) {
    result.trajectory.episode_id = episode_id;
    result.trajectory.widget = env.widget_spec();
    result.trajectory.motion.push_back(motion_sample(env));
  }
  env::ObservationVector obs = env.observe().to_vector();
  double weight = 1.0;
  const double discount = env.config().discount;
  while (env.active()) {
    const Eigen::VectorXd obs_n = agent.normalizer.normalize(Eigen::VectorXd(obs));
    Eigen::VectorXd action;
    double log_prob = 0.0;
    if (policy_rng) {
      PolicySample s = policy_sample(agent.policy, obs_n, agent.action_scale, *policy_rng);
      action = std::move(s.action);
      log_prob = s.log_prob;
    } else {
      action = policy_mean_action(agent.policy, obs_n, agent.action_scale);
    }
    const double value = record ? value_estimate(agent.value, obs_n) : 0.0;
    const env::StepOutcome out = env.step(sim::JointVector(action));
    result.discounted_return += weight * out.reward.total;
    weight *= discount;
    ++result.steps;
    if (record) {
      env::StepRecord rec;
      rec.t = result.steps - 1;
      rec.observation = obs;
      rec.action = sim::JointVector(action);
      rec.reward = out.reward;
      rec.log_prob = log_prob;
      rec.value = value;
      rec.done = out.done;
      result.trajectory.steps.push_back(rec);
      result.trajectory.motion.push_back(motion_sample(env));
    }
    obs = out.observation.to_vector();
    if (out.done) result.success = out.success;
  }
  result.trajectory.success = result.success;
  return result;
}

double evaluate_success(const Agent& agent, const env::EnvConfig& env_config,
                        sim::WidgetKind kind, int episodes, std::uint64_t seed) {
  if (episodes <= 0) return 0.0;
  env::WidgetEnv env(env_config, seed);
  int successes = 0;
  for (int e = 0; e < episodes; ++e) {
    env.reset(kind);
    if (run_episode(agent, env, nullptr, false).success) ++successes;
  }
  return static_cast<double>(successes) / episodes;
}

}  // namespace affordlab::learn
