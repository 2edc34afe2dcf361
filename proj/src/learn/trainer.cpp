#include "affordlab/learn/trainer.hpp"

#include <chrono>
#include <exception>
#include <cmath>
#include <iostream>
#include <thread>

#include "affordlab/learn/rollout.hpp"

namespace affordlab::learn {

sim::WidgetKind WidgetMix::sample(Rng& rng) const {
  double total = 0.0;
  for (const auto& [kind, w] : weights) total += w;
  double u = rng.uniform() * total;
  for (const auto& [kind, w] : weights) {
    if (u < w) return kind;
    u -= w;
  }
  return weights.back().first;
}

void WidgetMix::validate() const {
  if (weights.empty()) throw std::invalid_argument("widget mix is empty");
  double total = 0.0;
  for (const auto& [kind, w] : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("widget mix weights must be non-negative");
    total += w;
  }
  if (!(total > 0.0)) throw std::invalid_argument("widget mix weights sum to zero");
}

void TrainerConfig::validate() const {
  ppo.validate();
  mix.validate();
  if (num_envs <= 0) throw std::invalid_argument("num_envs must be positive");
  if (ppo.steps_per_update % num_envs != 0) {
    throw std::invalid_argument("steps_per_update must be a multiple of num_envs");
  }
  if (eval_episodes < 0) throw std::invalid_argument("eval_episodes must be >= 0");
  if (threads <= 0) throw std::invalid_argument("threads must be positive");
}

struct Trainer::Segment {
  Eigen::MatrixXd raw_obs;
  RolloutBatch batch;
  std::vector<double> finished_returns;
  std::exception_ptr error;
};

Trainer::Trainer(env::EnvConfig env_config, TrainerConfig config, Agent agent)
    : env_config_(std::move(env_config)),
      config_(std::move(config)),
      agent_(std::move(agent)),
      update_rng_(mix_seed(config_.seed, 0)) {
  config_.validate();
  env_config_.validate();
  if (agent_.observation_size() != env::kObservationSize) {
    throw std::invalid_argument("agent observation size does not match the environment");
  }
  apply_log_std_floor(agent_.policy, config_.log_std_floor);
  optimizer_ = PpoOptimizer(agent_, config_.ppo.learning_rate);
  for (int i = 0; i < config_.num_envs; ++i) {
    const auto stream = static_cast<std::uint64_t>(i);
    Worker w{env::WidgetEnv(env_config_, mix_seed(config_.seed, 100 + stream)),
             Rng(mix_seed(config_.seed, 10000 + stream)), {}, 0.0, 1.0};
    w.obs = w.env.reset(config_.mix.sample(w.env.rng())).to_vector();
    workers_.push_back(std::move(w));
  }
}

void Trainer::collect_segment(Worker& w, Segment& seg, int steps) const {
  const int obs_dim = agent_.observation_size();
  const int act_dim = agent_.action_size();
  const double discount = env_config_.discount;
  seg.raw_obs.resize(obs_dim, steps);
  RolloutBatch& b = seg.batch;
  b.observations.resize(obs_dim, steps);
  b.raw_actions.resize(act_dim, steps);
  b.rewards.assign(steps, 0.0);
  b.dones.assign(steps, 0);
  b.log_probs.assign(steps, 0.0);
  b.values.assign(steps, 0.0);

  for (int t = 0; t < steps; ++t) {
    const Eigen::VectorXd obs_n = agent_.normalizer.normalize(Eigen::VectorXd(w.obs));
    const PolicySample s = policy_sample(agent_.policy, obs_n, agent_.action_scale, w.policy_rng);
    const double v = value_estimate(agent_.value, obs_n);
    const env::StepOutcome out = w.env.step(sim::JointVector(s.action));

    double r = out.reward.total;
    w.episode_return += w.discount_weight * r;
    w.discount_weight *= discount;
    if (out.truncated) {
      // time-limit cut: bootstrap from the state the horizon interrupted
      const Eigen::VectorXd last = agent_.normalizer.normalize(
          Eigen::VectorXd(out.observation.to_vector()));
      r += discount * value_estimate(agent_.value, last);
    }
    seg.raw_obs.col(t) = w.obs;
    b.observations.col(t) = obs_n;
    b.raw_actions.col(t) = s.raw;
    b.rewards[t] = r;
    b.dones[t] = out.done ? 1 : 0;
    b.log_probs[t] = s.log_prob;
    b.values[t] = v;

    if (out.done) {
      seg.finished_returns.push_back(w.episode_return);
      w.episode_return = 0.0;
      w.discount_weight = 1.0;
      w.obs = w.env.reset(config_.mix.sample(w.env.rng())).to_vector();
    } else {
      w.obs = out.observation.to_vector();
    }
  }
  const double bootstrap =
      b.dones.back()
          ? 0.0
          : value_estimate(agent_.value, agent_.normalizer.normalize(Eigen::VectorXd(w.obs)));
  GaeResult gae = compute_gae(b.rewards, b.values, b.dones, bootstrap, discount,
                              config_.ppo.gae_lambda);
  b.advantages = std::move(gae.advantages);
  b.returns = std::move(gae.returns);
}

RolloutBatch Trainer::collect(double& mean_return, int& episodes) {
  const int steps = config_.ppo.steps_per_update / config_.num_envs;
  std::vector<Segment> segments(workers_.size());
  auto run_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      try {
        collect_segment(workers_[i], segments[i], steps);
      } catch (...) {
        segments[i].error = std::current_exception();
      }
    }
  };
  const auto n = workers_.size();
  const auto threads = std::min<std::size_t>(static_cast<std::size_t>(config_.threads), n);
  if (threads <= 1) {
    run_range(0, n);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (std::size_t begin = 0; begin < n; begin += chunk) {
      pool.emplace_back(run_range, begin, std::min(n, begin + chunk));
    }
    for (auto& th : pool) th.join();
  }
  for (const auto& seg : segments) {
    if (seg.error) std::rethrow_exception(seg.error);
  }

  const Eigen::Index total = static_cast<Eigen::Index>(steps) * static_cast<Eigen::Index>(n);
  RolloutBatch out;
  out.observations.resize(agent_.observation_size(), total);
  out.raw_actions.resize(agent_.action_size(), total);
  Eigen::MatrixXd raw_obs(agent_.observation_size(), total);
  double return_sum = 0.0;
  episodes = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Segment& seg = segments[i];
    const Eigen::Index off = static_cast<Eigen::Index>(i) * steps;
    out.observations.middleCols(off, steps) = seg.batch.observations;
    out.raw_actions.middleCols(off, steps) = seg.batch.raw_actions;
    raw_obs.middleCols(off, steps) = seg.raw_obs;
    auto append = [](auto& dst, const auto& src) { dst.insert(dst.end(), src.begin(), src.end()); };
    append(out.rewards, seg.batch.rewards);
    append(out.dones, seg.batch.dones);
    append(out.log_probs, seg.batch.log_probs);
    append(out.values, seg.batch.values);
    append(out.advantages, seg.batch.advantages);
    append(out.returns, seg.batch.returns);
    for (double r : seg.finished_returns) {
      return_sum += r;
      ++episodes;
    }
  }
  mean_return = episodes > 0 ? return_sum / episodes : std::numeric_limits<double>::quiet_NaN();
  if (config_.update_normalizer) agent_.normalizer.update(raw_obs);
  return out;
}

void Trainer::evaluate(UpdateRecord& rec) const {
  for (sim::WidgetKind kind : config_.eval_kinds) {
    const auto stream = static_cast<std::uint64_t>(kind);
    rec.success[kind] = evaluate_success(agent_, env_config_, kind, config_.eval_episodes,
                                         mix_seed(config_.eval_seed, stream));
  }
}

UpdateRecord Trainer::initial_record() {
  UpdateRecord rec;
  rec.update = updates_;
  rec.env_steps = env_steps_;
  rec.env_time = static_cast<double>(env_steps_) * env_config_.dt;
  evaluate(rec);
  return rec;
}

UpdateRecord Trainer::step() {
  const auto t0 = std::chrono::steady_clock::now();
  UpdateRecord rec;
  double mean_return = 0.0;
  int episodes = 0;
  std::optional<RolloutBatch> batch;
  try {
    batch = collect(mean_return, episodes);
  } catch (const NonFiniteError& e) {
    throw DivergenceError(std::string("non-finite policy output during rollout: ") + e.what());
  } catch (const std::exception& e) {
    std::cerr << "warning: environment fault during rollout, update skipped: " << e.what()
              << '\n';
    for (auto& w : workers_) {
      w.obs = w.env.reset(config_.mix.sample(w.env.rng())).to_vector();
      w.episode_return = 0.0;
      w.discount_weight = 1.0;
    }
  }
  ++updates_;
  rec.update = updates_;
  if (batch) {
    env_steps_ += batch->size();
    const Agent backup = agent_;
    try {
      rec.stats = ppo_update(agent_, optimizer_, *batch, config_.ppo, update_rng_,
                             config_.log_std_floor);
    } catch (const NonFiniteError& e) {
      agent_ = backup;
      throw DivergenceError(std::string("update ") + std::to_string(updates_) +
                            " diverged: " + e.what());
    }
    rec.mean_return = mean_return;
    rec.episodes = episodes;
  }
  rec.env_steps = env_steps_;
  rec.env_time = static_cast<double>(env_steps_) * env_config_.dt;
  evaluate(rec);
  rec.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

TrainResult train(const env::EnvConfig& env_config, const TrainerConfig& config, Agent initial,
                  int total_updates, const UpdateHook& hook) {
  Trainer trainer(env_config, config, std::move(initial));
  TrainResult result;
  result.log.push_back(trainer.initial_record());
  if (hook) hook(result.log.back(), trainer.agent());
  for (int u = 0; u < total_updates; ++u) {
    result.log.push_back(trainer.step());
    if (hook) hook(result.log.back(), trainer.agent());
  }
  result.agent = trainer.agent();
  return result;
}

}  // namespace affordlab::learn
