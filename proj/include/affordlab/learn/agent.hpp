#pragma once

#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "affordlab/common/random.hpp"
#include "affordlab/learn/mlp.hpp"

namespace affordlab::learn {

// Raised when a network output, loss or gradient stops being finite.
class NonFiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Running mean / variance of observations (parallel-merge update). Frozen
// whenever update() is not called.
class RunningNormalizer {
 public:
  explicit RunningNormalizer(int dim = 0, double clip = 10.0);

  // batch is (dim x n)
  void update(const Eigen::MatrixXd& batch);
  Eigen::VectorXd normalize(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd normalize(const Eigen::MatrixXd& x) const;

  int dim() const { return static_cast<int>(mean_.size()); }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::VectorXd& var() const { return var_; }
  double count() const { return count_; }
  double clip() const { return clip_; }
  void set_state(Eigen::VectorXd mean, Eigen::VectorXd var, double count);

 private:
  Eigen::VectorXd mean_;
  Eigen::VectorXd var_;
  double count_ = 1e-4;
  double clip_ = 10.0;
};

// Diagonal Gaussian over normalized actions. The mean comes from the network;
// log_std is a free, state-independent parameter vector.
struct PolicyParams {
  Mlp mean_net;
  Eigen::VectorXd log_std;
};

struct ValueParams {
  Mlp net;
};

struct AgentSpec {
  int observation_size = 28;
  int action_size = 7;
  std::vector<int> hidden{64, 64};
  Activation activation = Activation::kTanh;
  double initial_std = 0.5;    // in normalized action units
  double action_scale = 200.0; // normalized action 1.0 == this many force units
};

struct Agent {
  PolicyParams policy;
  ValueParams value;
  RunningNormalizer normalizer;
  double action_scale = 200.0;

  int observation_size() const { return policy.mean_net.input_size(); }
  int action_size() const { return policy.mean_net.output_size(); }
};

Agent make_agent(const AgentSpec& spec, Rng& rng);

struct PolicySample {
  Eigen::VectorXd raw;     // pre-clamp sample, normalized units
  Eigen::VectorXd action;  // motor forces after scaling and clamping
  double log_prob = 0.0;   // density of `raw`
};

double gaussian_log_prob(const Eigen::VectorXd& mean, const Eigen::VectorXd& log_std,
                         const Eigen::VectorXd& x);
double gaussian_entropy(const Eigen::VectorXd& log_std);

Eigen::VectorXd scale_action(const Eigen::VectorXd& raw, double action_scale);

// obs must already be normalized; throws NonFiniteError on a non-finite mean
PolicySample policy_sample(const PolicyParams& params, const Eigen::VectorXd& obs,
                           double action_scale, Rng& rng);
Eigen::VectorXd policy_mean_action(const PolicyParams& params, const Eigen::VectorXd& obs,
                                   double action_scale);
double value_estimate(const ValueParams& params, const Eigen::VectorXd& obs);

// keeps every log_std entry at or above `floor`
void apply_log_std_floor(PolicyParams& params, double floor);

}  // namespace affordlab::learn
