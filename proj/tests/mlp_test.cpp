#include <cmath>

#include <gtest/gtest.h>

#include "affordlab/common/random.hpp"
#include "affordlab/learn/adam.hpp"
#include "affordlab/learn/mlp.hpp"

namespace affordlab::learn {
namespace {

Eigen::MatrixXd random_matrix(int rows, int cols, Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) m(r, c) = rng.normal();
  return m;
}

TEST(MlpTest, ParameterCountAndLinearOutput) {
  Mlp net({3, 5, 2}, Activation::kTanh);
  EXPECT_EQ(net.num_params(), 3 * 5 + 5 + 5 * 2 + 2);
  // with a single layer the network is affine: W x + b
  Mlp lin({2, 1}, Activation::kTanh);
  lin.params() << 2.0, -3.0, 0.5;
  Eigen::VectorXd x(2);
  x << 1.5, 0.25;
  EXPECT_DOUBLE_EQ(lin.forward_one(x)[0], 2.0 * 1.5 - 3.0 * 0.25 + 0.5);
}

TEST(MlpTest, HandComputedTanhLayer) {
  Mlp net({1, 1, 1}, Activation::kTanh);
  net.params() << 0.7, 0.1, -1.3, 0.2;
  Eigen::VectorXd x(1);
  x << 0.4;
  EXPECT_DOUBLE_EQ(net.forward_one(x)[0], -1.3 * std::tanh(0.7 * 0.4 + 0.1) + 0.2);
}

TEST(MlpTest, OrthogonalInitHasOrthonormalRows) {
  Rng rng(1);
  Mlp net({8, 6, 3}, Activation::kTanh);
  net.init_orthogonal(rng, 1.0, 1.0);
  Eigen::Map<const Eigen::MatrixXd> w(net.params().data(), 6, 8);
  EXPECT_NEAR(((w * w.transpose()) - Eigen::MatrixXd::Identity(6, 6)).norm(), 0.0, 1e-10);
}

class MlpGradientTest : public ::testing::TestWithParam<Activation> {};

TEST_P(MlpGradientTest, BackpropMatchesFiniteDifferences) {
  Rng rng(2);
  Mlp net({4, 6, 5, 3}, GetParam());
  net.init_orthogonal(rng, 1.0, 1.0);
  for (Eigen::Index i = 0; i < net.num_params(); ++i) net.params()[i] += 0.1 * rng.normal();
  const Eigen::MatrixXd x = random_matrix(4, 7, rng);
  const Eigen::MatrixXd probe = random_matrix(3, 7, rng);
  // scalar loss L = sum(probe .* f(x))
  auto loss = [&](const Mlp& m) { return (probe.array() * m.forward(x).array()).sum(); };

  MlpCache cache;
  net.forward(x, &cache);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(net.num_params());
  Eigen::MatrixXd grad_x;
  net.backward(cache, probe, grad, &grad_x);

  const double h = 1e-6;
  for (Eigen::Index i = 0; i < net.num_params(); ++i) {
    Mlp plus = net, minus = net;
    plus.params()[i] += h;
    minus.params()[i] -= h;
    const double fd = (loss(plus) - loss(minus)) / (2 * h);
    const double denom = std::max({std::abs(fd), std::abs(grad[i]), 1e-6});
    EXPECT_LE(std::abs(fd - grad[i]) / denom, 1e-4) << "param " << i;
  }
  for (int r = 0; r < x.rows(); ++r) {
    for (int c = 0; c < x.cols(); ++c) {
      Eigen::MatrixXd xp = x, xm = x;
      xp(r, c) += h;
      xm(r, c) -= h;
      const double fd = ((probe.array() * net.forward(xp).array()).sum() -
                         (probe.array() * net.forward(xm).array()).sum()) /
                        (2 * h);
      const double denom = std::max({std::abs(fd), std::abs(grad_x(r, c)), 1e-6});
      EXPECT_LE(std::abs(fd - grad_x(r, c)) / denom, 1e-4);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Activations, MlpGradientTest,
                         ::testing::Values(Activation::kTanh, Activation::kRelu));

TEST(MlpTest, BackwardAccumulates) {
  Rng rng(3);
  Mlp net({2, 3, 1}, Activation::kTanh);
  net.init_orthogonal(rng, 1.0, 1.0);
  const Eigen::MatrixXd x = random_matrix(2, 4, rng);
  MlpCache cache;
  net.forward(x, &cache);
  const Eigen::MatrixXd g = Eigen::MatrixXd::Ones(1, 4);
  Eigen::VectorXd once = Eigen::VectorXd::Zero(net.num_params());
  net.backward(cache, g, once);
  Eigen::VectorXd twice = Eigen::VectorXd::Zero(net.num_params());
  net.backward(cache, g, twice);
  net.backward(cache, g, twice);
  EXPECT_NEAR((twice - 2 * once).norm(), 0.0, 1e-12);
}

TEST(MlpTest, ActivationNames) {
  EXPECT_EQ(activation_from_string(to_string(Activation::kRelu)), Activation::kRelu);
  EXPECT_EQ(activation_from_string("tanh"), Activation::kTanh);
  EXPECT_THROW(activation_from_string("sigmoid"), std::invalid_argument);
}

TEST(AdamTest, FirstStepMovesByLearningRate) {
  // with bias correction the first step is lr * g / (|g| + eps) per component
  Adam adam(3, AdamConfig{0.1, 0.9, 0.999, 1e-8});
  Eigen::VectorXd p = Eigen::VectorXd::Zero(3);
  Eigen::VectorXd g(3);
  g << 2.0, -0.5, 0.0;
  adam.step(p, g);
  EXPECT_NEAR(p[0], -0.1, 1e-8);
  EXPECT_NEAR(p[1], 0.1, 1e-7);
  EXPECT_EQ(p[2], 0.0);
  EXPECT_EQ(adam.steps_taken(), 1);
}

TEST(AdamTest, MinimizesQuadratic) {
  Adam adam(2, AdamConfig{0.05, 0.9, 0.999, 1e-8});
  Eigen::VectorXd p(2);
  p << 3.0, -2.0;
  for (int i = 0; i < 2000; ++i) adam.step(p, 2.0 * p);
  EXPECT_LT(p.norm(), 1e-2);
}

}  // namespace
}  // namespace affordlab::learn
