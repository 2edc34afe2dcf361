#pragma once

#include <Eigen/Core>

namespace affordlab::learn {

struct AdamConfig {
  double learning_rate = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Adaptive-moment gradient descent over one flat parameter buffer.
class Adam {
 public:
  Adam() = default;
  Adam(Eigen::Index size, AdamConfig config);

  void step(Eigen::Ref<Eigen::VectorXd> params, const Eigen::VectorXd& grad);
  void set_learning_rate(double lr) { config_.learning_rate = lr; }
  long long steps_taken() const { return t_; }

 private:
  AdamConfig config_;
  Eigen::VectorXd m_;
  Eigen::VectorXd v_;
  long long t_ = 0;
};

}  // namespace affordlab::learn
