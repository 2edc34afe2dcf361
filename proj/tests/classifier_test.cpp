#include <cmath>
#include <filesystem>

#include <gtest/gtest.h>

#include "affordlab/label/classifier.hpp"
#include "label_fixtures.hpp"

namespace affordlab::label {
namespace {

TEST(SoftmaxTest, EqualLogitsGiveHalf) {
  const auto d = softmax(0.3, 0.3);
  EXPECT_DOUBLE_EQ(d.p_press, 0.5);
  EXPECT_DOUBLE_EQ(d.p_slide, 0.5);
}

TEST(SoftmaxTest, MatchesLogisticAndNormalizes) {
  for (double gap : {-40.0, -2.0, 0.5, 3.0, 800.0}) {
    const auto d = softmax(gap, 0.0);
    EXPECT_NEAR(d.p_press, 1.0 / (1.0 + std::exp(-gap)), 1e-15);
    EXPECT_EQ(d.p_press + d.p_slide, 1.0);
    EXPECT_TRUE(std::isfinite(d.p_press));
  }
  EXPECT_EQ(softmax(-1.0, 2.0).argmax(), Label::kSlide);
  EXPECT_EQ(softmax(2.0, -1.0).argmax(), Label::kPress);
}

TEST(LabelTest, Names) {
  EXPECT_EQ(to_string(Label::kPress), "press");
  EXPECT_EQ(label_from_string("slide"), Label::kSlide);
  EXPECT_THROW(label_from_string("twist"), std::invalid_argument);
}

TEST(ClassifierTest, SeparableClassesReachFullAccuracy) {
  Rng rng(1);
  std::vector<LabeledMotion> data;
  for (int i = 0; i < 200; ++i) {
    LabeledMotion m;
    m.label = i % 2 ? Label::kSlide : Label::kPress;
    m.features = Eigen::VectorXd::Constant(kFeatureSize, m.label == Label::kPress ? 1.0 : -1.0);
    m.features[5] += 0.01 * rng.normal();
    data.push_back(m);
  }
  Rng train_rng(2);
  const TrainedClassifier tc = train_classifier(data, {}, train_rng);
  EXPECT_EQ(tc.report.test_accuracy, 1.0);
  EXPECT_EQ(tc.report.train_size + tc.report.val_size + tc.report.test_size, 200u);
  EXPECT_EQ(tc.report.train_size, 160u);
  EXPECT_EQ(tc.report.val_size, 20u);
  EXPECT_EQ(tc.report.recall(Label::kPress), 1.0);
  EXPECT_EQ(tc.report.recall(Label::kSlide), 1.0);
}

TEST(ClassifierTest, NoisyClustersAreLearned) {
  Rng rng(3);
  const auto data = testing::synthetic_motions(400, rng);
  Rng train_rng(4);
  const TrainedClassifier tc = train_classifier(data, {}, train_rng);
  EXPECT_GE(tc.report.test_accuracy, 0.9);
  EXPECT_GE(tc.report.best_epoch, 0);
  EXPECT_LE(tc.report.epochs_run, ClassifierConfig{}.max_epochs);
}

TEST(ClassifierTest, TrainingIsSeedDeterministic) {
  Rng rng(5);
  const auto data = testing::synthetic_motions(60, rng);
  Rng a(6), b(6);
  EXPECT_EQ(train_classifier(data, {}, a).params.net.params(),
            train_classifier(data, {}, b).params.net.params());
}

TEST(ClassifierTest, RejectsSingleClassAndSmallData) {
  Rng rng(7);
  auto data = testing::synthetic_motions(60, rng);
  auto only_press = data;
  std::erase_if(only_press, [](const LabeledMotion& m) { return m.label == Label::kSlide; });
  ASSERT_EQ(only_press.size(), 60u);
  only_press.insert(only_press.end(), only_press.begin(), only_press.end());
  Rng r(1);
  try {
    train_classifier(only_press, {}, r);
    FAIL() << "expected a single-class error";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("single-class"), std::string::npos);
  }
  data.resize(99);
  EXPECT_THROW(train_classifier(data, {}, r), std::invalid_argument);
}

TEST(ClassifierTest, ClassifyChecksDimension) {
  const ClassifierParams p = testing::displacement_classifier();
  EXPECT_THROW(classify(p, Eigen::VectorXd::Zero(3)), std::invalid_argument);
  Eigen::VectorXd f = Eigen::VectorXd::Zero(kFeatureSize);
  f[3 * kResampleSteps] = 0.02;
  const auto d = classify(p, f);
  EXPECT_EQ(d.argmax(), Label::kPress);
  EXPECT_EQ(d.p_press + d.p_slide, 1.0);
  // inference is a pure function
  EXPECT_EQ(classify(p, f).p_press, d.p_press);
}

TEST(ClassifierTest, SaveLoadRoundTrip) {
  Rng rng(8);
  const auto data = testing::synthetic_motions(60, rng);
  Rng train_rng(9);
  const TrainedClassifier tc = train_classifier(data, {}, train_rng);
  const auto path = std::filesystem::temp_directory_path() / "affordlab_classifier_test.json";
  save_classifier(path, tc);
  const ClassifierParams back = load_classifier(path);
  EXPECT_EQ(back.net.params(), tc.params.net.params());
  EXPECT_EQ(back.feature_mean, tc.params.feature_mean);
  EXPECT_EQ(back.feature_std, tc.params.feature_std);
  for (const auto& m : data) {
    EXPECT_EQ(classify(back, m.features).p_press, classify(tc.params, m.features).p_press);
  }
  std::filesystem::remove(path);
  EXPECT_THROW(load_classifier(path), std::runtime_error);
}

TEST(ClassifierConfigTest, Validation) {
  ClassifierConfig c;
  EXPECT_NO_THROW(c.validate());
  c.train_fraction = 0.95;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

}  // namespace
}  // namespace affordlab::label
