#include <sstream>

#include <gtest/gtest.h>

#include "affordlab/label/dataset.hpp"
#include "label_fixtures.hpp"
#include "scripted.hpp"

namespace affordlab::label {
namespace {

TEST(LabelTrajectoryTest, OnlyCompletedEpisodesAreLabeled) {
  env::WidgetEnv env({}, 21);
  env.reset(sim::WidgetKind::kButton);
  const env::Trajectory press = testing::record_scripted(env, testing::press_target, 1);
  ASSERT_TRUE(press.success);
  const auto labeled = label_trajectory(press);
  ASSERT_TRUE(labeled.has_value());
  EXPECT_EQ(labeled->label, Label::kPress);
  EXPECT_EQ(labeled->episode_id, 1u);
  EXPECT_EQ(labeled->features.size(), kFeatureSize);

  env.reset(sim::WidgetKind::kSlider);
  const env::Trajectory slide = testing::record_scripted(env, testing::slide_target, 2);
  ASSERT_TRUE(slide.success);
  EXPECT_EQ(label_trajectory(slide)->label, Label::kSlide);

  // a failed episode carries no label
  env.reset(sim::WidgetKind::kSlider);
  const env::Trajectory failed = testing::record_scripted(env, testing::press_target, 3);
  EXPECT_FALSE(failed.success);
  EXPECT_FALSE(label_trajectory(failed).has_value());

  // success flag without a completion reward on the last step is rejected
  env::Trajectory forged = failed;
  forged.success = true;
  EXPECT_FALSE(label_trajectory(forged).has_value());
}

TEST(LabelTrajectoryTest, DeceptiveWidgetNeverLabeled) {
  env::WidgetEnv env({}, 22);
  env.reset(sim::WidgetKind::kDeceptive);
  const env::Trajectory t = testing::record_scripted(env, testing::press_target);
  ASSERT_TRUE(t.success);
  EXPECT_FALSE(label_trajectory(t).has_value());
}

TEST(DatasetTest, RoundTripIsExact) {
  Rng rng(1);
  const auto data = testing::synthetic_motions(20, rng);
  std::stringstream ss;
  write_dataset(ss, data, {{"provenance", "p"}});
  const auto back = read_dataset(ss);
  ASSERT_EQ(back.size(), data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    EXPECT_EQ(back[i].features, data[i].features);
    EXPECT_EQ(back[i].label, data[i].label);
    EXPECT_EQ(back[i].episode_id, data[i].episode_id);
  }
}

TEST(DatasetTest, DetectsTruncationAndBadRecords) {
  Rng rng(2);
  const auto data = testing::synthetic_motions(5, rng);
  std::stringstream ss;
  write_dataset(ss, data);
  std::string text = ss.str();
  std::stringstream truncated(text.substr(0, text.rfind('\n', text.size() - 2) + 1));
  EXPECT_THROW(read_dataset(truncated), std::runtime_error);

  std::stringstream empty;
  EXPECT_THROW(read_dataset(empty), std::runtime_error);

  std::stringstream bad_label(
      "{\"schema\":\"affordlab.dataset\",\"version\":1,\"feature_size\":1,\"records\":1}\n"
      "{\"episode_id\":0,\"label\":\"twist\",\"features\":[0.0]}\n");
  try {
    read_dataset(bad_label);
    FAIL() << "expected an error";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
}

}  // namespace
}  // namespace affordlab::label
