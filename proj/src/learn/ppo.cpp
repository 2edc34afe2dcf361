#include "affordlab/learn/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace affordlab::learn {

void PpoConfig::validate() const {
  if (!(clip_epsilon > 0.0 && clip_epsilon < 1.0)) {
    throw std::invalid_argument("clip_epsilon must lie in (0, 1)");
  }
  if (!(gae_lambda >= 0.0 && gae_lambda <= 1.0)) {
    throw std::invalid_argument("gae_lambda must lie in [0, 1]");
  }
  if (!(discount > 0.0 && discount < 1.0)) throw std::invalid_argument("discount must lie in (0, 1)");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be positive");
  if (epochs_per_update <= 0 || minibatch_size <= 0 || steps_per_update <= 0) {
    throw std::invalid_argument("epochs, minibatch size and steps per update must be positive");
  }
  if (value_loss_coef < 0.0 || entropy_coef < 0.0 || !(max_grad_norm > 0.0)) {
    throw std::invalid_argument("loss coefficients must be non-negative, max_grad_norm positive");
  }
}

GaeResult compute_gae(std::span<const double> rewards, std::span<const double> values,
                      std::span<const std::uint8_t> dones, double bootstrap_value,
                      double discount, double lambda) {
  const std::size_t n = rewards.size();
  if (values.size() != n || dones.size() != n) {
    throw std::invalid_argument("compute_gae: rewards, values and dones must align");
  }
  GaeResult out;
  out.advantages.assign(n, 0.0);
  out.returns.assign(n, 0.0);
  double next_value = bootstrap_value;
  double next_adv = 0.0;
  for (std::size_t k = n; k-- > 0;) {
    const double live = dones[k] ? 0.0 : 1.0;
    const double delta = rewards[k] + discount * next_value * live - values[k];
    next_adv = delta + discount * lambda * live * next_adv;
    out.advantages[k] = next_adv;
    out.returns[k] = next_adv + values[k];
    next_value = values[k];
  }
  return out;
}

void normalize_advantages(std::vector<double>& advantages) {
  if (advantages.size() < 2) return;
  const double n = static_cast<double>(advantages.size());
  const double mean = std::accumulate(advantages.begin(), advantages.end(), 0.0) / n;
  double var = 0.0;
  for (double a : advantages) var += (a - mean) * (a - mean);
  const double stddev = std::sqrt(var / n);
  const double denom = stddev > 0.0 ? stddev : 1.0;
  for (double& a : advantages) a = (a - mean) / denom;
}

double clipped_surrogate(double ratio, double advantage, double epsilon) {
  const double clipped = std::clamp(ratio, 1.0 - epsilon, 1.0 + epsilon);
  return std::min(ratio * advantage, clipped * advantage);
}

void RolloutBatch::check_aligned() const {
  const auto n = static_cast<std::size_t>(observations.cols());
  if (static_cast<std::size_t>(raw_actions.cols()) != n || rewards.size() != n ||
      dones.size() != n || log_probs.size() != n || values.size() != n) {
    throw std::invalid_argument("RolloutBatch: misaligned columns");
  }
  if ((!advantages.empty() && advantages.size() != n) ||
      (!returns.empty() && returns.size() != n)) {
    throw std::invalid_argument("RolloutBatch: misaligned advantages or returns");
  }
}

AgentGradients AgentGradients::zeros_like(const Agent& agent) {
  return {Eigen::VectorXd::Zero(agent.policy.mean_net.num_params()),
          Eigen::VectorXd::Zero(agent.policy.log_std.size()),
          Eigen::VectorXd::Zero(agent.value.net.num_params())};
}

double AgentGradients::global_norm() const {
  return std::sqrt(policy.squaredNorm() + log_std.squaredNorm() + value.squaredNorm());
}

void AgentGradients::scale(double factor) {
  policy *= factor;
  log_std *= factor;
  value *= factor;
}

bool AgentGradients::all_finite() const {
  return policy.allFinite() && log_std.allFinite() && value.allFinite();
}

LossBreakdown ppo_loss(const PolicyParams& policy, const ValueParams& value,
                       const RolloutBatch& batch, std::span<const Eigen::Index> indices,
                       const PpoConfig& config, AgentGradients* grads) {
  const auto b = static_cast<Eigen::Index>(indices.size());
  if (b == 0) throw std::invalid_argument("ppo_loss: empty minibatch");
  if (batch.advantages.size() != static_cast<std::size_t>(batch.size())) {
    throw std::invalid_argument("ppo_loss: advantages have not been computed");
  }
  const Eigen::Index obs_dim = batch.observations.rows();
  const Eigen::Index act_dim = batch.raw_actions.rows();

  Eigen::MatrixXd obs(obs_dim, b);
  Eigen::MatrixXd raw(act_dim, b);
  for (Eigen::Index i = 0; i < b; ++i) {
    obs.col(i) = batch.observations.col(indices[i]);
    raw.col(i) = batch.raw_actions.col(indices[i]);
  }

  MlpCache policy_cache;
  MlpCache value_cache;
  const Eigen::MatrixXd mean = policy.mean_net.forward(obs, grads ? &policy_cache : nullptr);
  const Eigen::MatrixXd v = value.net.forward(obs, grads ? &value_cache : nullptr);

  const Eigen::ArrayXd inv_std = (-policy.log_std.array()).exp();
  Eigen::ArrayXXd z = raw - mean;
  z.colwise() *= inv_std;
  const double log_norm = (policy.log_std.array() + 0.91893853320467274178).sum();
  const Eigen::ArrayXd logp_new = -0.5 * z.square().colwise().sum().transpose() - log_norm;

  LossBreakdown out;
  Eigen::ArrayXd dlogp = Eigen::ArrayXd::Zero(b);  // dL/dlogp_new per sample
  const double inv_b = 1.0 / static_cast<double>(b);
  double value_sq = 0.0;
  Eigen::MatrixXd dv(1, b);
  for (Eigen::Index i = 0; i < b; ++i) {
    const Eigen::Index k = indices[i];
    const double log_ratio = logp_new[i] - batch.log_probs[k];
    const double ratio = std::exp(log_ratio);
    const double adv = batch.advantages[k];
    const double unclipped = ratio * adv;
    const double clipped =
        std::clamp(ratio, 1.0 - config.clip_epsilon, 1.0 + config.clip_epsilon) * adv;
    out.policy_loss -= std::min(unclipped, clipped) * inv_b;
    if (unclipped <= clipped) dlogp[i] = -unclipped * inv_b;
    out.approx_kl += ((ratio - 1.0) - log_ratio) * inv_b;
    if (std::abs(ratio - 1.0) > config.clip_epsilon) out.clip_fraction += inv_b;

    const double err = v(0, i) - batch.returns[k];
    value_sq += err * err;
    dv(0, i) = config.value_loss_coef * 2.0 * err * inv_b;
  }
  out.value_loss = value_sq * inv_b;
  out.entropy = gaussian_entropy(policy.log_std);
  out.total = out.policy_loss - config.entropy_coef * out.entropy +
              config.value_loss_coef * out.value_loss;

  if (grads) {
    // d logp / d mean = z / std ; d logp / d log_std = z^2 - 1
    Eigen::ArrayXXd dmean = z;
    dmean.colwise() *= inv_std;
    dmean.rowwise() *= dlogp.transpose();
    policy.mean_net.backward(policy_cache, dmean.matrix(), grads->policy);
    Eigen::ArrayXXd dls = z.square() - 1.0;
    dls.rowwise() *= dlogp.transpose();
    grads->log_std += dls.rowwise().sum().matrix();
    grads->log_std.array() -= config.entropy_coef;
    value.net.backward(value_cache, dv, grads->value);
  }
  return out;
}

PpoOptimizer::PpoOptimizer(const Agent& agent, double learning_rate)
    : policy_(agent.policy.mean_net.num_params(), {learning_rate}),
      log_std_(agent.policy.log_std.size(), {learning_rate}),
      value_(agent.value.net.num_params(), {learning_rate}) {}

void PpoOptimizer::step(Agent& agent, const AgentGradients& grads) {
  policy_.step(agent.policy.mean_net.params(), grads.policy);
  log_std_.step(agent.policy.log_std, grads.log_std);
  value_.step(agent.value.net.params(), grads.value);
}

UpdateStats ppo_update(Agent& agent, PpoOptimizer& optimizer, RolloutBatch& batch,
                       const PpoConfig& config, Rng& rng, double log_std_floor) {
  batch.check_aligned();
  if (batch.advantages.empty() || batch.returns.empty()) {
    throw std::invalid_argument("ppo_update: run GAE before updating");
  }
  if (!batch.advantages_normalized) {
    normalize_advantages(batch.advantages);
    batch.advantages_normalized = true;
  }
  const Eigen::Index n = batch.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});

  UpdateStats stats;
  const auto mb = static_cast<std::size_t>(config.minibatch_size);
  for (int epoch = 0; epoch < config.epochs_per_update; ++epoch) {
    shuffle(order, rng);
    for (std::size_t start = 0; start < order.size(); start += mb) {
      const std::size_t len = std::min(mb, order.size() - start);
      const std::span<const Eigen::Index> idx(order.data() + start, len);
      AgentGradients grads = AgentGradients::zeros_like(agent);
      const LossBreakdown loss = ppo_loss(agent.policy, agent.value, batch, idx, config, &grads);
      if (!std::isfinite(loss.total) || !grads.all_finite()) {
        throw NonFiniteError("ppo_update: non-finite loss or gradient");
      }
      const double norm = grads.global_norm();
      if (norm > config.max_grad_norm) grads.scale(config.max_grad_norm / norm);
      optimizer.step(agent, grads);
      apply_log_std_floor(agent.policy, log_std_floor);

      stats.policy_loss += loss.policy_loss;
      stats.value_loss += loss.value_loss;
      stats.entropy += loss.entropy;
      stats.approx_kl += loss.approx_kl;
      stats.clip_fraction += loss.clip_fraction;
      stats.grad_norm += norm;
      ++stats.minibatches;
    }
  }
  if (stats.minibatches > 0) {
    const double inv = 1.0 / stats.minibatches;
    stats.policy_loss *= inv;
    stats.value_loss *= inv;
    stats.entropy *= inv;
    stats.approx_kl *= inv;
    stats.clip_fraction *= inv;
    stats.grad_norm *= inv;
  }
  return stats;
}

}  // namespace affordlab::learn
