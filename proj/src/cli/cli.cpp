#include "affordlab/cli/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "affordlab/config/run_config.hpp"
#include "affordlab/harness/experiment.hpp"
#include "affordlab/label/dataset.hpp"
#include "affordlab/label/probe.hpp"
#include "affordlab/learn/checkpoint.hpp"
#include "affordlab/learn/rollout.hpp"

namespace affordlab::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kOutEnv = "AFFORDLAB_OUT";
constexpr const char* kDefaultOut = "affordlab-out";

struct GlobalOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool deterministic = false;
  std::optional<int> threads;
};

class MissingArtifact : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Context {
  harness::ExperimentPlan plan;
  harness::OutputLayout layout;
  std::string resolved;
  std::ostream& out;
  std::ostream& err;
};

fs::path default_out() {
  const char* env = std::getenv(kOutEnv);
  return env && *env ? fs::path(env) : fs::path(kDefaultOut);
}

// Config file + global flag overrides. Nothing is written here.
Context resolve(const GlobalOptions& g, std::ostream& out, std::ostream& err) {
  harness::ExperimentPlan plan =
      g.config.empty() ? harness::default_plan() : config::load_plan(g.config);
  if (g.seed) harness::derive_seeds(plan, *g.seed);
  if (g.threads) plan.threads = *g.threads;
  if (g.deterministic) plan.threads = 1;
  try {
    plan.validate();
  } catch (const std::invalid_argument& e) {
    throw config::ConfigError(std::string("invalid configuration: ") + e.what());
  }
  Context ctx{plan, {g.out.empty() ? default_out() : fs::path(g.out)}, {}, out, err};
  ctx.resolved = config::dump_plan(plan);
  ctx.plan.provenance = harness::provenance_stamp(ctx.resolved);
  return ctx;
}

// after a subcommand flag changed the plan
void refresh(Context& ctx) {
  try {
    ctx.plan.validate();
  } catch (const std::invalid_argument& e) {
    throw config::ConfigError(std::string("invalid configuration: ") + e.what());
  }
  ctx.resolved = config::dump_plan(ctx.plan);
  ctx.plan.provenance = harness::provenance_stamp(ctx.resolved);
}

void require_file(const fs::path& path, const char* what) {
  if (!fs::is_regular_file(path)) {
    throw MissingArtifact(std::string("missing ") + what + ": " + path.string());
  }
}

void write_snapshot(const Context& ctx) {
  fs::create_directories(ctx.layout.root);
  std::ofstream f(ctx.layout.config_snapshot());
  if (!f) throw std::runtime_error("cannot write " + ctx.layout.config_snapshot().string());
  f << "# provenance: " << ctx.plan.provenance << '\n' << ctx.resolved;
}

json meta(const Context& ctx) { return json{{"provenance", ctx.plan.provenance}}; }

std::string fmt(double v, int precision = 3) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  return buf;
}

std::string format_progress(const harness::MetricRow& r) {
  std::string s = "phase " + std::to_string(r.phase) + " update " + std::to_string(r.update);
  auto add = [&](const char* name, const std::optional<double>& v) {
    if (v) s += std::string("  ") + name + "=" + fmt(*v, 2);
  };
  add("button", r.success_button);
  add("slider", r.success_slider);
  add("deceptive", r.success_deceptive);
  add("p_press", r.p_press);
  add("p_slide", r.p_slide);
  add("return", r.mean_return);
  return s;
}

int cmd_train(const GlobalOptions& g, std::optional<int> updates, std::ostream& out,
              std::ostream& err) {
  Context ctx = resolve(g, out, err);
  if (updates) ctx.plan.phase1.updates = *updates;
  refresh(ctx);
  write_snapshot(ctx);
  const auto result = harness::run_phase1(
      ctx.plan, ctx.layout, [&](const harness::MetricRow& r) { out << format_progress(r) << '\n'; });
  const auto eval = harness::final_evaluation(
      result.agent, ctx.plan, ctx.plan.phase1.eval_kinds, ctx.plan.final_eval_episodes);
  json report{{"provenance", ctx.plan.provenance},
              {"episodes_per_kind", ctx.plan.final_eval_episodes},
              {"updates", ctx.plan.phase1.updates}};
  for (const auto& [kind, rate] : eval) {
    report["success"][std::string(sim::to_string(kind))] = rate;
    out << "final eval " << sim::to_string(kind) << ": " << fmt(rate) << " over "
        << ctx.plan.final_eval_episodes << " episodes\n";
  }
  std::ofstream f(ctx.layout.phase1_eval());
  f << report.dump(2) << '\n';
  if (!f) throw std::runtime_error("cannot write " + ctx.layout.phase1_eval().string());
  out << "checkpoint: " << ctx.layout.phase1_checkpoint().string() << '\n';
  return kOk;
}

int cmd_collect(const GlobalOptions& g, const std::string& checkpoint,
                std::optional<int> per_class, std::ostream& out, std::ostream& err) {
  Context ctx = resolve(g, out, err);
  if (per_class) ctx.plan.dataset.per_class = *per_class;
  ctx.plan.dataset.max_attempts_per_class =
      std::max(ctx.plan.dataset.max_attempts_per_class, 10 * ctx.plan.dataset.per_class);
  refresh(ctx);
  const fs::path ckpt = checkpoint.empty() ? ctx.layout.phase1_checkpoint() : fs::path(checkpoint);
  require_file(ckpt, "checkpoint");
  write_snapshot(ctx);
  const learn::Agent agent = learn::load_checkpoint(ckpt);
  const auto result = harness::collect_labeled_dataset(agent, ctx.plan);
  json m = meta(ctx);
  m["checkpoint"] = ckpt.string();
  for (const auto& [kind, n] : result.attempts) {
    m["attempts"][std::string(sim::to_string(kind))] = n;
    out << sim::to_string(kind) << ": " << ctx.plan.dataset.per_class << " successes in " << n
        << " attempts\n";
  }
  label::save_dataset(ctx.layout.dataset(), result.data, m);
  out << "dataset: " << ctx.layout.dataset().string() << " (" << result.data.size()
      << " records)\n";
  return kOk;
}

int cmd_classify(const GlobalOptions& g, const std::string& dataset, std::ostream& out,
                 std::ostream& err) {
  Context ctx = resolve(g, out, err);
  const fs::path path = dataset.empty() ? ctx.layout.dataset() : fs::path(dataset);
  require_file(path, "dataset");
  write_snapshot(ctx);
  const auto data = label::load_dataset(path);
  label::TrainedClassifier trained;
  try {
    trained = harness::train_plan_classifier(data, ctx.plan);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  json m = meta(ctx);
  m["dataset"] = path.string();
  label::save_classifier(ctx.layout.classifier(), trained, m);
  const auto& r = trained.report;
  out << "train accuracy " << fmt(r.train_accuracy) << "  validation " << fmt(r.val_accuracy)
      << "  test " << fmt(r.test_accuracy) << '\n'
      << "test confusion (rows true press/slide, cols predicted):\n"
      << "  " << r.test_confusion[0][0] << ' ' << r.test_confusion[0][1] << '\n'
      << "  " << r.test_confusion[1][0] << ' ' << r.test_confusion[1][1] << '\n'
      << "recall press " << fmt(r.recall(label::Label::kPress)) << "  slide "
      << fmt(r.recall(label::Label::kSlide)) << '\n'
      << "classifier: " << ctx.layout.classifier().string() << '\n';
  return kOk;
}

int cmd_adapt(const GlobalOptions& g, const std::string& checkpoint, const std::string& classifier,
              std::optional<int> updates, std::ostream& out, std::ostream& err) {
  Context ctx = resolve(g, out, err);
  if (updates) ctx.plan.phase2.updates = *updates;
  refresh(ctx);
  const fs::path ckpt = checkpoint.empty() ? ctx.layout.phase1_checkpoint() : fs::path(checkpoint);
  const fs::path clf = classifier.empty() ? ctx.layout.classifier() : fs::path(classifier);
  require_file(ckpt, "checkpoint");
  require_file(clf, "classifier");
  write_snapshot(ctx);
  const learn::Agent agent = learn::load_checkpoint(ckpt);
  const label::ClassifierParams params = label::load_classifier(clf);
  harness::run_phase2_adaptation(agent, params, ctx.plan, ctx.layout,
                                 [&](const harness::MetricRow& r) {
                                   out << format_progress(r) << '\n';
                                 });
  out << "metrics: " << ctx.layout.phase2_metrics().string() << '\n';
  return kOk;
}

int cmd_probe(const GlobalOptions& g, const std::string& checkpoint, const std::string& classifier,
              const std::string& widget, int rollouts, const std::string& record,
              std::ostream& out, std::ostream& err) {
  Context ctx = resolve(g, out, err);
  const sim::WidgetKind kind = sim::widget_kind_from_string(widget);
  const fs::path ckpt = checkpoint.empty() ? ctx.layout.phase1_checkpoint() : fs::path(checkpoint);
  const fs::path clf = classifier.empty() ? ctx.layout.classifier() : fs::path(classifier);
  require_file(ckpt, "checkpoint");
  require_file(clf, "classifier");
  const learn::Agent agent = learn::load_checkpoint(ckpt);
  const label::ClassifierParams params = label::load_classifier(clf);
  const std::uint64_t seed = ctx.plan.phase2.probe_seed;
  label::ProbeResult result;
  if (record.empty()) {
    result = label::probe_affordance(agent, ctx.plan.env, kind, rollouts, params, seed);
  } else {
    fs::create_directories(record);
    Rng policy_rng(mix_seed(seed, 1));
    result = label::probe_with(
        [&](env::WidgetEnv& env, int index) {
          auto traj = learn::run_episode(agent, env, &policy_rng, true,
                                         static_cast<std::uint64_t>(index))
                          .trajectory;
          traj.provenance = ctx.plan.provenance;
          char name[32];
          std::snprintf(name, sizeof(name), "probe_%03d.jsonl", index);
          env::save_trajectory(fs::path(record) / name, traj);
          return traj;
        },
        ctx.plan.env, kind, rollouts, params, seed);
  }
  out << "widget " << widget << "  rollouts " << rollouts << '\n'
      << "p_press " << fmt(result.distribution.p_press) << "  p_slide "
      << fmt(result.distribution.p_slide) << "  success " << fmt(result.success_rate) << '\n';
  return kOk;
}

int cmd_replay(const GlobalOptions& g, const std::string& trajectory, std::ostream& out,
               std::ostream& err) {
  Context ctx = resolve(g, out, err);
  require_file(trajectory, "trajectory");
  const env::Trajectory traj = env::load_trajectory(trajectory);
  const env::ReplayResult r = env::replay_trajectory(ctx.plan.env, traj);
  if (r.match) {
    out << "MATCH (" << r.rewards.size() << " steps)\n";
    return kOk;
  }
  out << "MISMATCH at step " << r.first_mismatch << '\n';
  return kFailure;
}

int cmd_emit(const GlobalOptions& g, std::ostream& out, std::ostream& err) {
  Context ctx = resolve(g, out, err);
  if (!fs::is_directory(ctx.layout.metrics())) {
    throw MissingArtifact("missing metrics directory: " + ctx.layout.metrics().string());
  }
  for (const auto& p : harness::emit_plot_data(ctx.layout, ctx.plan.provenance)) {
    out << "wrote " << p.string() << '\n';
  }
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"affordlab: affordance learning experiments on a simulated arm", "afford"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", harness::code_version());
  app.footer(std::string("Output root defaults to $") + kOutEnv + " or ./" + kDefaultOut +
             ".\nExit codes: 0 success, 1 runtime failure, 2 usage or config error, "
             "3 missing input artifact.");

  GlobalOptions g;
  app.add_option("--config", g.config, "YAML run configuration (defaults when omitted)");
  app.add_option("--seed", g.seed, "root seed; every stage seed derives from it");
  app.add_option("--out", g.out, "output directory");
  app.add_flag("--deterministic", g.deterministic, "sequential rollout collection");
  app.add_option("--threads", g.threads, "rollout worker threads")->check(CLI::PositiveNumber);

  std::optional<int> updates;
  std::optional<int> per_class;
  std::string checkpoint, classifier, dataset, trajectory, record;
  std::string widget = "deceptive";
  int rollouts = 50;

  auto* train = app.add_subcommand("train", "Phase 1: train on buttons and sliders");
  train->add_option("--updates", updates, "number of PPO updates")->check(CLI::NonNegativeNumber);

  auto* collect = app.add_subcommand("collect-labels", "roll out a checkpoint and save labeled motions");
  collect->add_option("--checkpoint", checkpoint, "agent checkpoint (default: Phase 1 final)");
  collect->add_option("--per-class", per_class, "successful episodes per class")
      ->check(CLI::PositiveNumber);

  auto* classify = app.add_subcommand("train-classifier", "train the press/slide motion classifier");
  classify->add_option("--dataset", dataset, "labeled dataset (default: datasets/labeled.jsonl)");

  auto* adapt = app.add_subcommand("adapt", "Phase 2: adapt to the deceptive widget with probes");
  adapt->add_option("--checkpoint", checkpoint, "Phase 1 checkpoint");
  adapt->add_option("--classifier", classifier, "classifier checkpoint");
  adapt->add_option("--updates", updates, "number of PPO updates")->check(CLI::NonNegativeNumber);

  auto* probe = app.add_subcommand("probe", "report a policy's affordance distribution on a widget");
  probe->add_option("--checkpoint", checkpoint, "agent checkpoint (default: Phase 1 final)");
  probe->add_option("--classifier", classifier, "classifier checkpoint");
  probe->add_option("--widget", widget, "button, slider or deceptive")
      ->check(CLI::IsMember({"button", "slider", "deceptive"}));
  probe->add_option("--rollouts", rollouts, "stochastic rollouts")->check(CLI::PositiveNumber);
  probe->add_option("--record", record, "directory for the probe trajectories (JSONL)");

  auto* replay = app.add_subcommand("replay", "re-simulate a stored trajectory, compare rewards");
  replay->add_option("--trajectory", trajectory, "trajectory file (JSONL)")->required();

  auto* emit = app.add_subcommand("emit-plots", "write per-panel plot data from metric CSVs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (train->parsed()) return cmd_train(g, updates, out, err);
    if (collect->parsed()) return cmd_collect(g, checkpoint, per_class, out, err);
    if (classify->parsed()) return cmd_classify(g, dataset, out, err);
    if (adapt->parsed()) return cmd_adapt(g, checkpoint, classifier, updates, out, err);
    if (probe->parsed()) return cmd_probe(g, checkpoint, classifier, widget, rollouts, record, out, err);
    if (replay->parsed()) return cmd_replay(g, trajectory, out, err);
    if (emit->parsed()) return cmd_emit(g, out, err);
  } catch (const config::ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const MissingArtifact& e) {
    err << "error: " << e.what() << '\n';
    return kMissingArtifact;
  } catch (const learn::DivergenceError& e) {
    err << "error: training diverged: " << e.what() << '\n';
    return kFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}

}  // namespace affordlab::cli
