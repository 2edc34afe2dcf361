#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "affordlab/common/random.hpp"
#include "affordlab/learn/adam.hpp"
#include "affordlab/learn/agent.hpp"

namespace affordlab::learn {

struct PpoConfig {
  double clip_epsilon = 0.2;
  double gae_lambda = 0.95;
  double discount = 0.99;
  double learning_rate = 3e-4;
  int epochs_per_update = 10;
  int minibatch_size = 256;
  int steps_per_update = 4096;
  double value_loss_coef = 0.5;
  double entropy_coef = 0.0;
  double max_grad_norm = 0.5;

  void validate() const;
};

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;
};

// Generalized advantage estimation over one contiguous segment.
// values[t] estimates the state before step t; bootstrap_value estimates the
// state after the last step and is ignored when that step is terminal.
GaeResult compute_gae(std::span<const double> rewards, std::span<const double> values,
                      std::span<const std::uint8_t> dones, double bootstrap_value, double discount,
                      double lambda);

// in place: mean 0, std 1 when there is more than one element
void normalize_advantages(std::vector<double>& advantages);

// min(ratio * A, clip(ratio, 1 - eps, 1 + eps) * A)
double clipped_surrogate(double ratio, double advantage, double epsilon);

// Flat, aligned transition storage. Columns index samples.
struct RolloutBatch {
  Eigen::MatrixXd observations;  // normalized, obs_dim x n
  Eigen::MatrixXd raw_actions;   // pre-clamp samples, act_dim x n
  std::vector<double> rewards;
  std::vector<std::uint8_t> dones;  // 1 where the episode ended at this step
  std::vector<double> log_probs;
  std::vector<double> values;
  std::vector<double> advantages;
  std::vector<double> returns;
  bool advantages_normalized = false;

  Eigen::Index size() const { return observations.cols(); }
  // throws std::invalid_argument when column/element counts disagree
  void check_aligned() const;
};

struct LossBreakdown {
  double total = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double approx_kl = 0.0;
  double clip_fraction = 0.0;
};

struct AgentGradients {
  Eigen::VectorXd policy;
  Eigen::VectorXd log_std;
  Eigen::VectorXd value;

  static AgentGradients zeros_like(const Agent& agent);
  double global_norm() const;
  void scale(double factor);
  bool all_finite() const;
};

// PPO objective on the samples `indices` of `batch`:
//   policy_loss - entropy_coef * entropy + value_loss_coef * value_loss
// If `grads` is non-null it receives the gradient of that total.
LossBreakdown ppo_loss(const PolicyParams& policy, const ValueParams& value,
                       const RolloutBatch& batch, std::span<const Eigen::Index> indices,
                       const PpoConfig& config, AgentGradients* grads);

struct UpdateStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double approx_kl = 0.0;
  double clip_fraction = 0.0;
  double grad_norm = 0.0;
  int minibatches = 0;
};

// Optimizer state carried across updates.
class PpoOptimizer {
 public:
  PpoOptimizer() = default;
  PpoOptimizer(const Agent& agent, double learning_rate);

  void step(Agent& agent, const AgentGradients& grads);

 private:
  Adam policy_;
  Adam log_std_;
  Adam value_;
};

// Runs the clipped-surrogate update. Advantages are normalized in place
// first. Throws NonFiniteError when a loss or gradient is non-finite; the
// agent may then be partially updated and should be discarded by the caller.
UpdateStats ppo_update(Agent& agent, PpoOptimizer& optimizer, RolloutBatch& batch,
                       const PpoConfig& config, Rng& rng, double log_std_floor);

}  // namespace affordlab::learn
