#include "affordlab/learn/agent.hpp"

#include <cmath>
#include <numbers>

namespace affordlab::learn {

namespace {
constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // 0.5 * log(2 pi)
}

RunningNormalizer::RunningNormalizer(int dim, double clip)
    : mean_(Eigen::VectorXd::Zero(dim)), var_(Eigen::VectorXd::Ones(dim)), clip_(clip) {}

void RunningNormalizer::update(const Eigen::MatrixXd& batch) {
  if (batch.rows() != dim()) throw std::invalid_argument("RunningNormalizer: dim mismatch");
  const double n = static_cast<double>(batch.cols());
  if (n == 0.0) return;
  const Eigen::VectorXd batch_mean = batch.rowwise().mean();
  const Eigen::VectorXd batch_var =
      (batch.colwise() - batch_mean).array().square().rowwise().sum() / n;
  const double total = count_ + n;
  const Eigen::VectorXd delta = batch_mean - mean_;
  mean_ += delta * (n / total);
  const Eigen::VectorXd m2 = var_ * count_ + batch_var * n +
                             delta.cwiseAbs2() * (count_ * n / total);
  var_ = m2 / total;
  count_ = total;
}

Eigen::VectorXd RunningNormalizer::normalize(const Eigen::VectorXd& x) const {
  const Eigen::ArrayXd z = (x - mean_).array() / (var_.array() + 1e-8).sqrt();
  return z.max(-clip_).min(clip_).matrix();
}

Eigen::MatrixXd RunningNormalizer::normalize(const Eigen::MatrixXd& x) const {
  const Eigen::ArrayXd inv_std = 1.0 / (var_.array() + 1e-8).sqrt();
  Eigen::MatrixXd z = x.colwise() - mean_;
  z.array().colwise() *= inv_std;
  return z.array().max(-clip_).min(clip_).matrix();
}

void RunningNormalizer::set_state(Eigen::VectorXd mean, Eigen::VectorXd var, double count) {
  if (mean.size() != var.size()) throw std::invalid_argument("RunningNormalizer: size mismatch");
  mean_ = std::move(mean);
  var_ = std::move(var);
  count_ = count;
}

Agent make_agent(const AgentSpec& spec, Rng& rng) {
  Agent agent;
  std::vector<int> policy_sizes{spec.observation_size};
  policy_sizes.insert(policy_sizes.end(), spec.hidden.begin(), spec.hidden.end());
  std::vector<int> value_sizes = policy_sizes;
  policy_sizes.push_back(spec.action_size);
  value_sizes.push_back(1);

  agent.policy.mean_net = Mlp(policy_sizes, spec.activation);
  agent.policy.mean_net.init_orthogonal(rng, std::sqrt(2.0), 0.01);
  agent.policy.log_std = Eigen::VectorXd::Constant(spec.action_size, std::log(spec.initial_std));
  agent.value.net = Mlp(value_sizes, spec.activation);
  agent.value.net.init_orthogonal(rng, std::sqrt(2.0), 1.0);
  agent.normalizer = RunningNormalizer(spec.observation_size);
  agent.action_scale = spec.action_scale;
  return agent;
}

double gaussian_log_prob(const Eigen::VectorXd& mean, const Eigen::VectorXd& log_std,
                         const Eigen::VectorXd& x) {
  const Eigen::ArrayXd z = (x - mean).array() / log_std.array().exp();
  return (-0.5 * z.square() - log_std.array() - kLogSqrt2Pi).sum();
}

double gaussian_entropy(const Eigen::VectorXd& log_std) {
  return (log_std.array() + 0.5 + kLogSqrt2Pi).sum();
}

Eigen::VectorXd scale_action(const Eigen::VectorXd& raw, double action_scale) {
  return (action_scale * raw.array()).max(-action_scale).min(action_scale).matrix();
}

PolicySample policy_sample(const PolicyParams& params, const Eigen::VectorXd& obs,
                           double action_scale, Rng& rng) {
  const Eigen::VectorXd mean = params.mean_net.forward_one(obs);
  if (!mean.allFinite()) throw NonFiniteError("policy network produced a non-finite mean");
  PolicySample s;
  s.raw.resize(mean.size());
  for (Eigen::Index i = 0; i < mean.size(); ++i) {
    s.raw[i] = mean[i] + std::exp(params.log_std[i]) * rng.normal();
  }
  s.log_prob = gaussian_log_prob(mean, params.log_std, s.raw);
  s.action = scale_action(s.raw, action_scale);
  return s;
}

Eigen::VectorXd policy_mean_action(const PolicyParams& params, const Eigen::VectorXd& obs,
                                   double action_scale) {
  const Eigen::VectorXd mean = params.mean_net.forward_one(obs);
  if (!mean.allFinite()) throw NonFiniteError("policy network produced a non-finite mean");
  return scale_action(mean, action_scale);
}

double value_estimate(const ValueParams& params, const Eigen::VectorXd& obs) {
  return params.net.forward_one(obs)[0];
}

void apply_log_std_floor(PolicyParams& params, double floor) {
  params.log_std = params.log_std.cwiseMax(floor);
}

}  // namespace affordlab::learn
