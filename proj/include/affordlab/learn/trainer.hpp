#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "affordlab/env/widget_env.hpp"
#include "affordlab/learn/ppo.hpp"

namespace affordlab::learn {

// Thrown when an update diverges; the trainer has already rolled back to the
// last good parameters.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct WidgetMix {
  std::vector<std::pair<sim::WidgetKind, double>> weights{
      {sim::WidgetKind::kButton, 0.5}, {sim::WidgetKind::kSlider, 0.5}};

  sim::WidgetKind sample(Rng& rng) const;
  void validate() const;
};

struct TrainerConfig {
  PpoConfig ppo;
  int num_envs = 8;
  WidgetMix mix;
  std::vector<sim::WidgetKind> eval_kinds{sim::WidgetKind::kButton, sim::WidgetKind::kSlider};
  int eval_episodes = 20;
  std::uint64_t seed = 1;
  std::uint64_t eval_seed = 7919;
  int threads = 1;
  bool update_normalizer = true;
  double log_std_floor = -std::numeric_limits<double>::infinity();

  void validate() const;
};

struct UpdateRecord {
  int update = 0;
  long long env_steps = 0;
  double env_time = 0.0;  // simulated seconds of experience
  double mean_return = std::numeric_limits<double>::quiet_NaN();
  int episodes = 0;
  std::map<sim::WidgetKind, double> success;
  std::optional<UpdateStats> stats;
  double wall_seconds = 0.0;
};

// Alternates rollout collection and PPO updates. Collection is deterministic
// for any thread count: every worker owns its environment and random stream,
// and the observation normalizer is frozen during a rollout.
class Trainer {
 public:
  Trainer(env::EnvConfig env_config, TrainerConfig config, Agent agent);

  // evaluation of the current agent without learning (update index 0)
  UpdateRecord initial_record();
  // one rollout + update + evaluation; throws DivergenceError
  UpdateRecord step();

  const Agent& agent() const { return agent_; }
  const TrainerConfig& config() const { return config_; }
  int updates_done() const { return updates_; }

 private:
  struct Worker {
    env::WidgetEnv env;
    Rng policy_rng;
    env::ObservationVector obs;
    double episode_return = 0.0;
    double discount_weight = 1.0;
  };
  struct Segment;

  void collect_segment(Worker& worker, Segment& seg, int steps) const;
  RolloutBatch collect(double& mean_return, int& episodes);
  void evaluate(UpdateRecord& rec) const;

  env::EnvConfig env_config_;
  TrainerConfig config_;
  Agent agent_;
  PpoOptimizer optimizer_;
  Rng update_rng_;
  std::vector<Worker> workers_;
  int updates_ = 0;
  long long env_steps_ = 0;
};

using UpdateHook = std::function<void(const UpdateRecord&, const Agent&)>;

struct TrainResult {
  Agent agent;
  std::vector<UpdateRecord> log;
};

// Runs `total_updates` updates, calling `hook` after the initial evaluation
// and after every update. With zero updates the initial agent is returned
// unchanged.
TrainResult train(const env::EnvConfig& env_config, const TrainerConfig& config, Agent initial,
                  int total_updates, const UpdateHook& hook = {});

}  // namespace affordlab::learn
