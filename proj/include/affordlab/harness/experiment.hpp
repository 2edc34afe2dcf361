#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "affordlab/env/widget_env.hpp"
#include "affordlab/harness/metrics.hpp"
#include "affordlab/label/classifier.hpp"
#include "affordlab/label/probe.hpp"
#include "affordlab/learn/agent.hpp"
#include "affordlab/learn/ppo.hpp"
#include "affordlab/learn/trainer.hpp"

namespace affordlab::harness {

struct PhaseSettings {
  int updates = 0;
  int num_envs = 8;
  learn::WidgetMix mix;
  std::vector<sim::WidgetKind> eval_kinds;
  int eval_episodes = 20;
  int checkpoint_every = 0;  // 0 keeps only the final checkpoint
  int probe_every = 0;       // 0 disables probing
  int probe_rollouts = 50;
  sim::WidgetKind probe_widget = sim::WidgetKind::kDeceptive;
  double min_std = 0.0;      // exploration std floor, normalized units; 0 disables
  bool update_normalizer = true;
  std::uint64_t seed = 0;
  std::uint64_t eval_seed = 0;
  std::uint64_t probe_seed = 0;
};

struct DatasetSettings {
  int per_class = 500;
  int max_attempts_per_class = 5000;
  std::uint64_t seed = 0;
};

struct ExperimentPlan {
  env::EnvConfig env;
  learn::AgentSpec agent;
  learn::PpoConfig ppo;
  PhaseSettings phase1;
  int final_eval_episodes = 200;
  DatasetSettings dataset;
  label::ClassifierConfig classifier;
  std::uint64_t classifier_seed = 0;
  PhaseSettings phase2;
  std::uint64_t seed = 1;
  int threads = 1;
  std::string provenance;  // stamped into every output file

  void validate() const;
};

// Phase 1 and Phase 2 defaults with every seed derived from `seed`.
ExperimentPlan default_plan(std::uint64_t seed = 1);
// Recomputes every per-stage seed from `root`.
void derive_seeds(ExperimentPlan& plan, std::uint64_t root);

// "affordlab <version> config <16 hex digits>"
std::string provenance_stamp(std::string_view resolved_config_text);
std::string code_version();

// Directory layout of one experiment run.
struct OutputLayout {
  std::filesystem::path root;

  std::filesystem::path config_snapshot() const { return root / "config.yaml"; }
  std::filesystem::path checkpoints() const { return root / "checkpoints"; }
  std::filesystem::path metrics() const { return root / "metrics"; }
  std::filesystem::path plotdata() const { return root / "plotdata"; }
  std::filesystem::path datasets() const { return root / "datasets"; }

  std::filesystem::path phase1_checkpoint() const { return checkpoints() / "phase1_final.json"; }
  std::filesystem::path phase2_checkpoint() const { return checkpoints() / "phase2_final.json"; }
  std::filesystem::path classifier() const { return checkpoints() / "classifier.json"; }
  std::filesystem::path phase1_metrics() const { return metrics() / "phase1.csv"; }
  std::filesystem::path phase2_metrics() const { return metrics() / "phase2.csv"; }
  std::filesystem::path phase1_eval() const { return metrics() / "phase1_eval.json"; }
  std::filesystem::path dataset() const { return datasets() / "labeled.jsonl"; }
};

// Called after every logged row (including the initial one).
using ProgressFn = std::function<void(const MetricRow&)>;

struct PhaseResult {
  learn::Agent agent;
  std::vector<MetricRow> rows;
};

// Trains on the Phase 1 mix from a fresh agent, logging eval success per kind
// every update. Writes metrics/phase1.csv and checkpoints/phase1_final.json.
// On divergence the last good agent is saved and the DivergenceError is
// rethrown.
PhaseResult run_phase1(const ExperimentPlan& plan, const OutputLayout& out,
                       const ProgressFn& progress = {});

// Mean-action success over `episodes` per kind on a dedicated widget stream.
std::map<sim::WidgetKind, double> final_evaluation(const learn::Agent& agent,
                                                   const ExperimentPlan& plan,
                                                   const std::vector<sim::WidgetKind>& kinds,
                                                   int episodes);

struct DatasetResult {
  std::vector<label::LabeledMotion> data;
  std::map<sim::WidgetKind, int> attempts;
};

// Stochastic rollouts on Button and Slider widgets until `per_class`
// successful episodes of each are gathered; failures are discarded. Throws
// std::runtime_error when a class cannot be filled within the attempt budget.
DatasetResult collect_labeled_dataset(const learn::Agent& agent, const ExperimentPlan& plan);

label::TrainedClassifier train_plan_classifier(const std::vector<label::LabeledMotion>& data,
                                               const ExperimentPlan& plan);

// Continues training with every episode on the Phase 2 widget. The agent is
// probed (read only) at the configured cadence; the probe result and eval
// success are logged. Writes metrics/phase2.csv and
// checkpoints/phase2_final.json. Throws std::logic_error if a probe changes
// the agent.
PhaseResult run_phase2_adaptation(const learn::Agent& phase1_agent,
                                  const label::ClassifierParams& classifier,
                                  const ExperimentPlan& plan, const OutputLayout& out,
                                  const ProgressFn& progress = {});

// Writes plotdata/fig7a.csv (Phase 1 success per kind), fig7b.csv (Phase 2
// success) and fig7c.csv (Phase 2 affordance probabilities) in long format:
// update,env_time,series,value. Missing inputs or columns raise
// std::runtime_error with a schema diff. Returns the written paths.
std::vector<std::filesystem::path> emit_plot_data(const OutputLayout& out,
                                                  const std::string& provenance);

}  // namespace affordlab::harness
