#include "affordlab/learn/mlp.hpp"

#include <stdexcept>

#include <Eigen/QR>

namespace affordlab::learn {

std::string_view to_string(Activation a) {
  return a == Activation::kTanh ? "tanh" : "relu";
}

Activation activation_from_string(std::string_view name) {
  if (name == "tanh") return Activation::kTanh;
  if (name == "relu") return Activation::kRelu;
  throw std::invalid_argument("unknown activation '" + std::string(name) + "'");
}

Mlp::Mlp(std::vector<int> layer_sizes, Activation hidden)
    : sizes_(std::move(layer_sizes)), hidden_(hidden) {
  if (sizes_.size() < 2) throw std::invalid_argument("Mlp needs at least two layer sizes");
  Eigen::Index total = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    if (sizes_[l] <= 0 || sizes_[l + 1] <= 0) {
      throw std::invalid_argument("Mlp layer sizes must be positive");
    }
    offsets_.push_back(total);
    total += static_cast<Eigen::Index>(sizes_[l]) * sizes_[l + 1] + sizes_[l + 1];
  }
  params_ = Eigen::VectorXd::Zero(total);
}

Eigen::Map<const Eigen::MatrixXd> Mlp::weight(int layer) const {
  return {params_.data() + offsets_[layer], sizes_[layer + 1], sizes_[layer]};
}

Eigen::Map<const Eigen::VectorXd> Mlp::bias(int layer) const {
  const Eigen::Index w = static_cast<Eigen::Index>(sizes_[layer]) * sizes_[layer + 1];
  return {params_.data() + offsets_[layer] + w, sizes_[layer + 1]};
}

void Mlp::init_orthogonal(Rng& rng, double hidden_gain, double output_gain) {
  for (int l = 0; l < num_layers(); ++l) {
    const int rows = sizes_[l + 1];
    const int cols = sizes_[l];
    const int n = std::max(rows, cols);
    Eigen::MatrixXd g(n, n);
    for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = rng.normal();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
    // sign correction makes the distribution uniform over orthogonal matrices
    const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < n; ++i) {
      if (r(i, i) < 0.0) q.col(i) *= -1.0;
    }
    const double gain = (l + 1 == num_layers()) ? output_gain : hidden_gain;
    Eigen::Map<Eigen::MatrixXd> w(params_.data() + offsets_[l], rows, cols);
    w = gain * q.topLeftCorner(rows, cols);
    Eigen::Map<Eigen::VectorXd>(params_.data() + offsets_[l] + rows * cols, rows).setZero();
  }
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x, MlpCache* cache) const {
  if (x.rows() != input_size()) throw std::invalid_argument("Mlp::forward: input size mismatch");
  if (cache) {
    cache->inputs.resize(num_layers());
    cache->pre.resize(num_layers());
  }
  Eigen::MatrixXd h = x;
  for (int l = 0; l < num_layers(); ++l) {
    Eigen::MatrixXd z = weight(l) * h;
    z.colwise() += bias(l);
    if (cache) {
      cache->inputs[l] = std::move(h);
      cache->pre[l] = z;
    }
    if (l + 1 < num_layers()) {
      h = hidden_ == Activation::kTanh ? Eigen::MatrixXd(z.array().tanh())
                                       : Eigen::MatrixXd(z.array().max(0.0));
    } else {
      h = std::move(z);
    }
  }
  return h;
}

Eigen::VectorXd Mlp::forward_one(const Eigen::VectorXd& x) const {
  if (x.size() != input_size()) throw std::invalid_argument("Mlp::forward: input size mismatch");
  Eigen::VectorXd h = x;
  for (int l = 0; l < num_layers(); ++l) {
    Eigen::VectorXd z = weight(l) * h + bias(l);
    if (l + 1 < num_layers()) {
      h = hidden_ == Activation::kTanh ? Eigen::VectorXd(z.array().tanh())
                                       : Eigen::VectorXd(z.array().max(0.0));
    } else {
      h = std::move(z);
    }
  }
  return h;
}

void Mlp::backward(const MlpCache& cache, const Eigen::MatrixXd& grad_output,
                   Eigen::VectorXd& grad, Eigen::MatrixXd* grad_input) const {
  if (grad.size() != num_params()) throw std::invalid_argument("Mlp::backward: grad size");
  Eigen::MatrixXd delta = grad_output;
  for (int l = num_layers() - 1; l >= 0; --l) {
    if (l + 1 < num_layers()) {
      const Eigen::MatrixXd& z = cache.pre[l];
      if (hidden_ == Activation::kTanh) {
        // inputs[l + 1] already holds tanh(z)
        delta.array() *= 1.0 - cache.inputs[l + 1].array().square();
      } else {
        delta.array() *= (z.array() > 0.0).cast<double>();
      }
    }
    const int rows = sizes_[l + 1];
    const int cols = sizes_[l];
    Eigen::Map<Eigen::MatrixXd> gw(grad.data() + offsets_[l], rows, cols);
    Eigen::Map<Eigen::VectorXd> gb(grad.data() + offsets_[l] + rows * cols, rows);
    gw.noalias() += delta * cache.inputs[l].transpose();
    gb += delta.rowwise().sum();
    if (l > 0 || grad_input) {
      Eigen::MatrixXd next = weight(l).transpose() * delta;
      delta = std::move(next);
    }
  }
  if (grad_input) *grad_input = std::move(delta);
}

}  // namespace affordlab::learn
