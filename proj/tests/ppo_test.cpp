#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "affordlab/common/random.hpp"
#include "affordlab/learn/ppo.hpp"
#include "oracles.hpp"

namespace affordlab::learn {
namespace {

TEST(GaeTest, MatchesBruteForceOracle) {
  Rng rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto n = static_cast<std::size_t>(1 + rng.uniform_index(20));
    std::vector<double> r(n), v(n);
    std::vector<std::uint8_t> d(n);
    for (std::size_t i = 0; i < n; ++i) {
      r[i] = rng.uniform(-1.0, 1.0);
      v[i] = rng.normal();
      d[i] = rng.uniform() < 0.15 ? 1 : 0;
    }
    const double bootstrap = rng.normal();
    const double gamma = rng.uniform(0.8, 1.0);
    const double lambda = rng.uniform(0.0, 1.0);
    const GaeResult got = compute_gae(r, v, d, bootstrap, gamma, lambda);
    const GaeResult want = testing::brute_force_gae(r, v, d, bootstrap, gamma, lambda);
    ASSERT_EQ(got.advantages.size(), n);
    for (std::size_t i = 0; i < n; ++i) {
      ASSERT_NEAR(got.advantages[i], want.advantages[i], 1e-10) << "trial " << trial;
      ASSERT_NEAR(got.returns[i], want.returns[i], 1e-10) << "trial " << trial;
    }
  }
}

TEST(GaeTest, LambdaOneGivesDiscountedReturn) {
  const std::vector<double> r{1.0, 0.0, 2.0};
  const std::vector<double> v{0.3, -0.2, 0.1};
  const std::vector<std::uint8_t> d{0, 0, 1};
  const GaeResult g = compute_gae(r, v, d, 99.0, 0.9, 1.0);
  EXPECT_NEAR(g.returns[0], 1.0 + 0.81 * 2.0, 1e-12);
  EXPECT_NEAR(g.returns[2], 2.0, 1e-12);
}

TEST(GaeTest, LambdaZeroGivesOneStepTd) {
  const std::vector<double> r{0.5, 0.25};
  const std::vector<double> v{1.0, 2.0};
  const std::vector<std::uint8_t> d{0, 0};
  const GaeResult g = compute_gae(r, v, d, 4.0, 0.5, 0.0);
  EXPECT_NEAR(g.advantages[0], 0.5 + 0.5 * 2.0 - 1.0, 1e-12);
  EXPECT_NEAR(g.advantages[1], 0.25 + 0.5 * 4.0 - 2.0, 1e-12);
}

TEST(GaeTest, RejectsMisalignedInput) {
  const std::vector<double> r{1.0, 2.0};
  const std::vector<double> v{1.0};
  const std::vector<std::uint8_t> d{0, 0};
  EXPECT_THROW(compute_gae(r, v, d, 0.0, 0.99, 0.95), std::invalid_argument);
}

TEST(SurrogateTest, RatioOneGivesZeroAdvantageTerm) {
  EXPECT_EQ(clipped_surrogate(1.0, 0.0, 0.2), 0.0);
  EXPECT_EQ(clipped_surrogate(1.0, 3.0, 0.2), 3.0);
}

TEST(SurrogateTest, ClipsLargeRatioForPositiveAdvantage) {
  for (double a : {0.5, 1.0, 7.0}) {
    EXPECT_NEAR(clipped_surrogate(2.0, a, 0.2), 1.2 * a, 1e-15);
  }
  // negative advantage keeps the unclipped, more pessimistic term
  EXPECT_NEAR(clipped_surrogate(2.0, -1.0, 0.2), -2.0, 1e-15);
  EXPECT_NEAR(clipped_surrogate(0.5, -1.0, 0.2), -0.8, 1e-15);
}

TEST(AdvantageNormalizationTest, ZeroMeanUnitStd) {
  std::vector<double> a{1.0, 2.0, 3.0, 10.0};
  normalize_advantages(a);
  const double mean = std::accumulate(a.begin(), a.end(), 0.0) / 4.0;
  double var = 0.0;
  for (double x : a) var += (x - mean) * (x - mean);
  EXPECT_NEAR(mean, 0.0, 1e-12);
  EXPECT_NEAR(var / 4.0, 1.0, 1e-12);
  std::vector<double> constant{2.0, 2.0};
  normalize_advantages(constant);
  EXPECT_EQ(constant, (std::vector<double>{0.0, 0.0}));
  std::vector<double> single{5.0};
  normalize_advantages(single);
  EXPECT_EQ(single[0], 5.0);
}

TEST(PpoLossTest, GradientMatchesFiniteDifferences) {
  PpoConfig cfg;
  cfg.entropy_coef = 0.01;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const testing::TinyProblem p = testing::make_tiny_problem(seed);
    ASSERT_LE(p.agent.policy.mean_net.num_params() + p.agent.value.net.num_params() + 2, 64);
    EXPECT_LE(testing::max_gradient_error(p, cfg), 1e-4) << "seed " << seed;
  }
}

TEST(PpoLossTest, OnPolicyRatioWithNormalizedAdvantagesGivesZero) {
  testing::TinyProblem p = testing::make_tiny_problem(4);
  for (Eigen::Index i = 0; i < p.batch.size(); ++i) {
    const Eigen::VectorXd mean = p.agent.policy.mean_net.forward_one(p.batch.observations.col(i));
    p.batch.log_probs[i] =
        gaussian_log_prob(mean, p.agent.policy.log_std, p.batch.raw_actions.col(i));
  }
  normalize_advantages(p.batch.advantages);
  PpoConfig cfg;
  const LossBreakdown l = ppo_loss(p.agent.policy, p.agent.value, p.batch, p.indices, cfg, nullptr);
  EXPECT_NEAR(l.policy_loss, 0.0, 1e-12);
  EXPECT_NEAR(l.approx_kl, 0.0, 1e-12);
  EXPECT_EQ(l.clip_fraction, 0.0);
}

TEST(SurrogateTest, NeverExceedsClipBound) {
  Rng rng(9);
  for (int i = 0; i < 10000; ++i) {
    const double ratio = std::exp(rng.uniform(-3.0, 3.0));
    const double a = rng.normal(0.0, 5.0);
    EXPECT_LE(clipped_surrogate(ratio, a, 0.2), 1.2 * std::abs(a) + 1e-15);
  }
}

TEST(AdvantageNormalizationTest, RandomBatches) {
  Rng rng(10);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> a(2 + rng.uniform_index(500));
    for (double& x : a) x = rng.normal(rng.uniform(-50, 50), rng.uniform(0.01, 20));
    normalize_advantages(a);
    const double n = static_cast<double>(a.size());
    const double mean = std::accumulate(a.begin(), a.end(), 0.0) / n;
    double var = 0.0;
    for (double x : a) var += (x - mean) * (x - mean);
    EXPECT_LE(std::abs(mean), 1e-9);
    EXPECT_NEAR(std::sqrt(var / n), 1.0, 1e-6);
  }
}

TEST(PpoUpdateTest, ImprovesSurrogateAndRejectsNan) {
  testing::TinyProblem p = testing::make_tiny_problem(5);
  PpoConfig cfg;
  cfg.minibatch_size = 4;
  cfg.steps_per_update = 12;
  cfg.epochs_per_update = 4;
  cfg.learning_rate = 1e-2;
  PpoOptimizer opt(p.agent, cfg.learning_rate);
  Rng rng(1);
  RolloutBatch batch = p.batch;
  const UpdateStats stats = ppo_update(p.agent, opt, batch, cfg, rng, -5.0);
  EXPECT_TRUE(batch.advantages_normalized);
  EXPECT_EQ(stats.minibatches, 12);
  EXPECT_TRUE(std::isfinite(stats.policy_loss));

  RolloutBatch bad = p.batch;
  bad.advantages[0] = std::nan("");
  Agent copy = p.agent;
  EXPECT_THROW(ppo_update(copy, opt, bad, cfg, rng, -5.0), NonFiniteError);
}

TEST(PpoConfigTest, Validation) {
  PpoConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.clip_epsilon = 0.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = PpoConfig{};
  cfg.gae_lambda = 1.5;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

}  // namespace
}  // namespace affordlab::learn
