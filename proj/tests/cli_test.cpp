#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "affordlab/cli/cli.hpp"
#include "affordlab/config/run_config.hpp"
#include "affordlab/label/dataset.hpp"
#include "label_fixtures.hpp"
#include "tiny_plan.hpp"

namespace affordlab::cli {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "afford");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path write_tiny_config(const fs::path& dir) {
  fs::create_directories(dir);
  const fs::path path = dir / "tiny.cfg";
  std::ofstream(path) << config::dump_plan(testing::tiny_plan());
  return path;
}

TEST(CliTest, MissingConfigIsUsageErrorWithNoOutputs) {
  const fs::path out = testing::fresh_dir("cli_missing_cfg");
  const Outcome r = run_cli({"--config", "/nonexistent/x.cfg", "--out", out.string(), "train"});
  EXPECT_EQ(r.code, kUsage);
  EXPECT_NE(r.err.find("/nonexistent/x.cfg"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(out));
}

TEST(CliTest, BadFlagIsUsageError) {
  EXPECT_EQ(run_cli({"train", "--updates", "-3"}).code, kUsage);
  EXPECT_EQ(run_cli({"frobnicate"}).code, kUsage);
}

TEST(CliTest, TrainWithZeroUpdates) {
  const fs::path dir = testing::fresh_dir("cli_train0");
  const fs::path cfg = write_tiny_config(dir / "cfg");
  const fs::path out = dir / "out";
  const Outcome r = run_cli({"--config", cfg.string(), "--out", out.string(), "--deterministic",
                             "train", "--updates", "0"});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_TRUE(fs::exists(out / "config.yaml"));
  EXPECT_TRUE(fs::exists(out / "checkpoints" / "phase1_final.json"));
  EXPECT_TRUE(fs::exists(out / "metrics" / "phase1_eval.json"));
  const std::string csv = testing::slurp(out / "metrics" / "phase1.csv");
  EXPECT_EQ(csv.rfind("# provenance: affordlab ", 0), 0u);
}

TEST(CliTest, MissingCheckpointNamesTheFile) {
  const fs::path dir = testing::fresh_dir("cli_missing_ckpt");
  const fs::path cfg = write_tiny_config(dir / "cfg");
  const Outcome r = run_cli({"--config", cfg.string(), "--out", (dir / "out").string(),
                             "collect-labels", "--checkpoint", "/nonexistent/agent.json"});
  EXPECT_EQ(r.code, kMissingArtifact);
  EXPECT_NE(r.err.find("/nonexistent/agent.json"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(dir / "out" / "config.yaml"));
}

TEST(CliTest, SingleClassDatasetIsRejected) {
  const fs::path dir = testing::fresh_dir("cli_single_class");
  const fs::path cfg = write_tiny_config(dir / "cfg");
  Rng rng(1);
  auto data = testing::synthetic_motions(80, rng);
  for (auto& m : data) m.label = label::Label::kPress;
  label::save_dataset(dir / "press_only.jsonl", data);
  const Outcome r = run_cli({"--config", cfg.string(), "--out", (dir / "out").string(),
                             "train-classifier", "--dataset", (dir / "press_only.jsonl").string()});
  EXPECT_EQ(r.code, kFailure);
  EXPECT_NE(r.err.find("single-class"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(dir / "out" / "checkpoints" / "classifier.json"));
}

TEST(CliTest, ProbeRecordThenReplayMatches) {
  const fs::path dir = testing::fresh_dir("cli_probe_replay");
  const fs::path cfg = write_tiny_config(dir / "cfg");
  const std::string out = (dir / "out").string();
  ASSERT_EQ(run_cli({"--config", cfg.string(), "--out", out, "train", "--updates", "0"}).code, kOk);
  label::TrainedClassifier clf;
  clf.params = testing::displacement_classifier();
  label::save_classifier(dir / "clf.json", clf);
  const Outcome p = run_cli({"--config", cfg.string(), "--out", out, "probe", "--classifier",
                             (dir / "clf.json").string(), "--widget", "deceptive", "--rollouts",
                             "2", "--record", (dir / "traj").string()});
  ASSERT_EQ(p.code, kOk) << p.err;
  EXPECT_NE(p.out.find("p_press"), std::string::npos);
  const Outcome r = run_cli({"--config", cfg.string(), "--out", out, "replay", "--trajectory",
                             (dir / "traj" / "probe_000.jsonl").string()});
  EXPECT_EQ(r.code, kOk) << r.err;
  EXPECT_EQ(r.out.rfind("MATCH", 0), 0u) << r.out;
}

TEST(CliTest, EmitPlotsWithoutMetricsIsMissingArtifact) {
  const fs::path dir = testing::fresh_dir("cli_emit_missing");
  const fs::path cfg = write_tiny_config(dir / "cfg");
  const Outcome r = run_cli({"--config", cfg.string(), "--out", (dir / "out").string(),
                             "emit-plots"});
  EXPECT_EQ(r.code, kMissingArtifact);
}

}  // namespace
}  // namespace affordlab::cli
