#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "affordlab/common/random.hpp"

namespace affordlab::learn {

enum class Activation { kTanh, kRelu };

std::string_view to_string(Activation a);
Activation activation_from_string(std::string_view name);

// Intermediate values kept by a batched forward pass for backpropagation.
struct MlpCache {
  // inputs[l] is the input to layer l; pre[l] its pre-activation
  std::vector<Eigen::MatrixXd> inputs;
  std::vector<Eigen::MatrixXd> pre;
};

// Fully connected network with a shared hidden activation and a linear
// output layer. All weights and biases live in one flat vector so optimizers,
// gradient clipping and checkpointing work on a single buffer.
//
// Layout per layer l: W_l (out x in, column-major) followed by b_l (out).
class Mlp {
 public:
  Mlp() = default;
  Mlp(std::vector<int> layer_sizes, Activation hidden);

  // orthogonal initialization: hidden layers with `hidden_gain`, the output
  // layer with `output_gain`; biases zero
  void init_orthogonal(Rng& rng, double hidden_gain, double output_gain);

  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }
  int num_layers() const { return static_cast<int>(sizes_.size()) - 1; }
  Eigen::Index num_params() const { return params_.size(); }
  const std::vector<int>& layer_sizes() const { return sizes_; }
  Activation hidden_activation() const { return hidden_; }

  Eigen::VectorXd& params() { return params_; }
  const Eigen::VectorXd& params() const { return params_; }

  // x is (input_size x batch); returns (output_size x batch)
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x, MlpCache* cache = nullptr) const;
  Eigen::VectorXd forward_one(const Eigen::VectorXd& x) const;

  // Adds dL/dparams to `grad` given dL/doutput. If grad_input is non-null it
  // receives dL/dx.
  void backward(const MlpCache& cache, const Eigen::MatrixXd& grad_output,
                Eigen::VectorXd& grad, Eigen::MatrixXd* grad_input = nullptr) const;

 private:
  Eigen::Map<const Eigen::MatrixXd> weight(int layer) const;
  Eigen::Map<const Eigen::VectorXd> bias(int layer) const;

  std::vector<int> sizes_;
  std::vector<Eigen::Index> offsets_;
  Activation hidden_ = Activation::kTanh;
  Eigen::VectorXd params_;
};

}  // namespace affordlab::learn
