#include "affordlab/harness/experiment.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "affordlab/common/hash.hpp"
#include "affordlab/label/dataset.hpp"
#include "affordlab/learn/checkpoint.hpp"
#include "affordlab/learn/rollout.hpp"

#ifndef AFFORDLAB_VERSION
#define AFFORDLAB_VERSION "dev"
#endif

namespace affordlab::harness {

using nlohmann::json;
using sim::WidgetKind;

namespace {

void validate_phase(const PhaseSettings& p, const char* name) {
  auto fail = [&](const std::string& what) {
    throw std::invalid_argument(std::string(name) + ": " + what);
  };
  if (p.updates < 0) fail("updates must be >= 0");
  if (p.num_envs <= 0) fail("num_envs must be positive");
  p.mix.validate();
  if (p.eval_episodes < 0) fail("eval_episodes must be >= 0");
  if (p.checkpoint_every < 0) fail("checkpoint_every must be >= 0");
  if (p.probe_every < 0) fail("probe_every must be >= 0");
  if (p.probe_every > 0 && p.probe_rollouts < 1) fail("probe_rollouts must be >= 1");
  if (!(p.min_std >= 0.0)) fail("min_std must be >= 0");
}

std::optional<double> success_of(const learn::UpdateRecord& rec, WidgetKind kind) {
  const auto it = rec.success.find(kind);
  if (it == rec.success.end()) return std::nullopt;
  return it->second;
}

MetricRow to_row(int phase, const learn::UpdateRecord& rec) {
  MetricRow row;
  row.phase = phase;
  row.update = rec.update;
  row.env_steps = rec.env_steps;
  row.env_time = rec.env_time;
  if (std::isfinite(rec.mean_return)) row.mean_return = rec.mean_return;
  row.episodes = rec.episodes;
  row.success_button = success_of(rec, WidgetKind::kButton);
  row.success_slider = success_of(rec, WidgetKind::kSlider);
  row.success_deceptive = success_of(rec, WidgetKind::kDeceptive);
  if (rec.stats) {
    row.policy_loss = rec.stats->policy_loss;
    row.value_loss = rec.stats->value_loss;
    row.entropy = rec.stats->entropy;
    row.kl = rec.stats->approx_kl;
    row.clip_frac = rec.stats->clip_fraction;
  }
  return row;
}

learn::TrainerConfig trainer_config(const ExperimentPlan& plan, const PhaseSettings& phase) {
  learn::TrainerConfig tc;
  tc.ppo = plan.ppo;
  tc.ppo.discount = plan.env.discount;
  tc.num_envs = phase.num_envs;
  tc.mix = phase.mix;
  tc.eval_kinds = phase.eval_kinds;
  tc.eval_episodes = phase.eval_episodes;
  tc.seed = phase.seed;
  tc.eval_seed = phase.eval_seed;
  tc.threads = plan.threads;
  tc.update_normalizer = phase.update_normalizer;
  if (phase.min_std > 0.0) tc.log_std_floor = std::log(phase.min_std);
  return tc;
}

json checkpoint_meta(const ExperimentPlan& plan, int phase, int update) {
  return json{{"provenance", plan.provenance}, {"phase", phase}, {"update", update}};
}

std::filesystem::path numbered_checkpoint(const OutputLayout& out, int phase, int update) {
  char name[64];
  std::snprintf(name, sizeof(name), "phase%d_u%04d.json", phase, update);
  return out.checkpoints() / name;
}

struct PhaseLoopHooks {
  int phase = 1;
  std::filesystem::path metrics;
  std::filesystem::path final_checkpoint;
  // fills probe columns; may be empty
  std::function<void(MetricRow&, const learn::Agent&)> probe;
};

PhaseResult run_phase(const ExperimentPlan& plan, const PhaseSettings& settings,
                      learn::Agent initial, const OutputLayout& out, const PhaseLoopHooks& hooks,
                      const ProgressFn& progress) {
  learn::Trainer trainer(plan.env, trainer_config(plan, settings), std::move(initial));
  MetricWriter writer(hooks.metrics, plan.provenance);
  PhaseResult result;
  auto log = [&](const learn::UpdateRecord& rec, double wall) {
    MetricRow row = to_row(hooks.phase, rec);
    if (hooks.probe && settings.probe_every > 0 && rec.update % settings.probe_every == 0) {
      hooks.probe(row, trainer.agent());
    }
    writer.write(row, wall);
    result.rows.push_back(row);
    if (progress) progress(row);
  };

  const auto t0 = std::chrono::steady_clock::now();
  log(trainer.initial_record(),
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  for (int u = 0; u < settings.updates; ++u) {
    learn::UpdateRecord rec;
    try {
      rec = trainer.step();
    } catch (const learn::DivergenceError&) {
      char name[64];
      std::snprintf(name, sizeof(name), "phase%d_last_good.json", hooks.phase);
      learn::save_checkpoint(out.checkpoints() / name, trainer.agent(),
                             checkpoint_meta(plan, hooks.phase, trainer.updates_done() - 1));
      throw;
    }
    log(rec, rec.wall_seconds);
    if (settings.checkpoint_every > 0 && rec.update % settings.checkpoint_every == 0) {
      learn::save_checkpoint(numbered_checkpoint(out, hooks.phase, rec.update), trainer.agent(),
                             checkpoint_meta(plan, hooks.phase, rec.update));
    }
  }
  writer.close();
  result.agent = trainer.agent();
  learn::save_checkpoint(hooks.final_checkpoint, result.agent,
                         checkpoint_meta(plan, hooks.phase, trainer.updates_done()));
  return result;
}

}  // namespace

void ExperimentPlan::validate() const {
  env.validate();
  ppo.validate();
  classifier.validate();
  validate_phase(phase1, "phase1");
  validate_phase(phase2, "phase2");
  if (final_eval_episodes < 1) throw std::invalid_argument("final_eval_episodes must be >= 1");
  if (dataset.per_class < 1) throw std::invalid_argument("dataset.per_class must be >= 1");
  if (dataset.max_attempts_per_class < dataset.per_class) {
    throw std::invalid_argument("dataset.max_attempts_per_class must be >= per_class");
  }
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
  if (agent.observation_size != env::kObservationSize || agent.action_size != sim::kNumJoints) {
    throw std::invalid_argument("agent sizes must match the environment (28 -> 7)");
  }
}

void derive_seeds(ExperimentPlan& plan, std::uint64_t root) {
  plan.seed = root;
  plan.phase1.seed = mix_seed(root, 1);
  plan.phase1.eval_seed = mix_seed(root, 2);
  plan.phase1.probe_seed = mix_seed(root, 3);
  plan.dataset.seed = mix_seed(root, 4);
  plan.classifier_seed = mix_seed(root, 5);
  plan.phase2.seed = mix_seed(root, 6);
  plan.phase2.eval_seed = mix_seed(root, 7);
  plan.phase2.probe_seed = mix_seed(root, 8);
}

ExperimentPlan default_plan(std::uint64_t seed) {
  ExperimentPlan plan;
  plan.phase1.updates = 100;
  plan.phase1.mix.weights = {{WidgetKind::kButton, 0.5}, {WidgetKind::kSlider, 0.5}};
  plan.phase1.eval_kinds = {WidgetKind::kButton, WidgetKind::kSlider};
  plan.phase1.checkpoint_every = 50;
  plan.phase2.updates = 60;
  plan.phase2.mix.weights = {{WidgetKind::kDeceptive, 1.0}};
  plan.phase2.eval_kinds = {WidgetKind::kDeceptive};
  plan.phase2.probe_every = 1;
  plan.phase2.min_std = 0.3;
  plan.phase2.update_normalizer = false;
  plan.phase2.checkpoint_every = 0;
  derive_seeds(plan, seed);
  return plan;
}

std::string code_version() { return AFFORDLAB_VERSION; }

std::string provenance_stamp(std::string_view resolved_config_text) {
  return "affordlab " + code_version() + " config " + hex64(fnv1a(resolved_config_text));
}

PhaseResult run_phase1(const ExperimentPlan& plan, const OutputLayout& out,
                       const ProgressFn& progress) {
  plan.validate();
  Rng init_rng(mix_seed(plan.phase1.seed, 99));
  learn::Agent agent = learn::make_agent(plan.agent, init_rng);
  PhaseLoopHooks hooks;
  hooks.phase = 1;
  hooks.metrics = out.phase1_metrics();
  hooks.final_checkpoint = out.phase1_checkpoint();
  return run_phase(plan, plan.phase1, std::move(agent), out, hooks, progress);
}

std::map<WidgetKind, double> final_evaluation(const learn::Agent& agent,
                                              const ExperimentPlan& plan,
                                              const std::vector<WidgetKind>& kinds, int episodes) {
  std::map<WidgetKind, double> result;
  for (WidgetKind kind : kinds) {
    const std::uint64_t seed = mix_seed(plan.seed, 1000 + static_cast<std::uint64_t>(kind));
    result[kind] = learn::evaluate_success(agent, plan.env, kind, episodes, seed);
  }
  return result;
}

DatasetResult collect_labeled_dataset(const learn::Agent& agent, const ExperimentPlan& plan) {
  DatasetResult result;
  std::uint64_t episode_id = 0;
  for (WidgetKind kind : {WidgetKind::kButton, WidgetKind::kSlider}) {
    const auto stream = static_cast<std::uint64_t>(kind);
    env::WidgetEnv env(plan.env, mix_seed(plan.dataset.seed, 10 + stream));
    Rng policy_rng(mix_seed(plan.dataset.seed, 20 + stream));
    int successes = 0;
    int attempts = 0;
    while (successes < plan.dataset.per_class) {
      if (attempts >= plan.dataset.max_attempts_per_class) {
        throw std::runtime_error(
            "dataset collection: only " + std::to_string(successes) + " successful " +
            std::string(sim::to_string(kind)) + " episodes in " + std::to_string(attempts) +
            " attempts (need " + std::to_string(plan.dataset.per_class) +
            "); the checkpoint's success rate is too low");
      }
      ++attempts;
      env.reset(kind);
      const learn::EpisodeResult ep = learn::run_episode(agent, env, &policy_rng, true, episode_id++);
      if (auto labeled = label::label_trajectory(ep.trajectory)) {
        result.data.push_back(std::move(*labeled));
        ++successes;
      }
    }
    result.attempts[kind] = attempts;
  }
  return result;
}

label::TrainedClassifier train_plan_classifier(const std::vector<label::LabeledMotion>& data,
                                               const ExperimentPlan& plan) {
  Rng rng(plan.classifier_seed);
  return label::train_classifier(data, plan.classifier, rng);
}

PhaseResult run_phase2_adaptation(const learn::Agent& phase1_agent,
                                  const label::ClassifierParams& classifier,
                                  const ExperimentPlan& plan, const OutputLayout& out,
                                  const ProgressFn& progress) {
  plan.validate();
  PhaseLoopHooks hooks;
  hooks.phase = 2;
  hooks.metrics = out.phase2_metrics();
  hooks.final_checkpoint = out.phase2_checkpoint();
  const PhaseSettings& settings = plan.phase2;
  hooks.probe = [&](MetricRow& row, const learn::Agent& agent) {
    const std::uint64_t before = learn::agent_hash(agent);
    const label::ProbeResult probe =
        label::probe_affordance(agent, plan.env, settings.probe_widget, settings.probe_rollouts,
                                classifier, mix_seed(settings.probe_seed, row.update));
    if (learn::agent_hash(agent) != before) {
      throw std::logic_error("affordance probe modified the agent");
    }
    row.p_press = probe.distribution.p_press;
    row.p_slide = probe.distribution.p_slide;
    row.probe_success = probe.success_rate;
  };
  return run_phase(plan, settings, phase1_agent, out, hooks, progress);
}

namespace {

struct PanelSpec {
  std::string file;
  std::vector<std::string> series;
};

void write_panel(const CsvTable& table, const PanelSpec& panel, const std::filesystem::path& path,
                 const std::string& provenance) {
  const int u = table.column("update");
  const int t = table.column("env_time");
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << "# provenance: " << provenance << '\n' << "update,env_time,series,value\n";
  for (const auto& row : table.rows) {
    for (const auto& s : panel.series) {
      const std::string& v = row[static_cast<std::size_t>(table.column(s))];
      if (v.empty()) continue;
      f << row[static_cast<std::size_t>(u)] << ',' << row[static_cast<std::size_t>(t)] << ','
        << s << ',' << v << '\n';
    }
  }
  if (!f) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace

std::vector<std::filesystem::path> emit_plot_data(const OutputLayout& out,
                                                  const std::string& provenance) {
  struct Source {
    std::filesystem::path csv;
    std::vector<PanelSpec> panels;
  };
  const std::vector<Source> sources{
      {out.phase1_metrics(), {{"fig7a.csv", {"success_button", "success_slider"}}}},
      {out.phase2_metrics(),
       {{"fig7b.csv", {"success_deceptive", "probe_success"}},
        {"fig7c.csv", {"p_press", "p_slide"}}}},
  };
  bool any = false;
  for (const auto& s : sources) any = any || std::filesystem::exists(s.csv);
  if (!any) {
    throw std::runtime_error("no metric files found under " + out.metrics().string());
  }
  std::vector<std::filesystem::path> written;
  std::filesystem::create_directories(out.plotdata());
  for (const auto& s : sources) {
    if (!std::filesystem::exists(s.csv)) continue;
    const CsvTable table = read_csv(s.csv);
    for (const auto& panel : s.panels) {
      std::vector<std::string> required{"update", "env_time"};
      required.insert(required.end(), panel.series.begin(), panel.series.end());
      require_columns(table, required, s.csv.string());
      const auto path = out.plotdata() / panel.file;
      write_panel(table, panel, path, provenance);
      written.push_back(path);
    }
  }
  return written;
}

}  // namespace affordlab::harness
