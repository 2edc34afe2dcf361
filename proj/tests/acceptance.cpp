// End-to-end acceptance run: trains the full pipeline from configs/base.cfg
// and prints one PASS/FAIL line per criterion. Exit status is non-zero when
// any criterion fails.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "affordlab/config/run_config.hpp"
#include "affordlab/env/trajectory.hpp"
#include "affordlab/env/widget_sampler.hpp"
#include "affordlab/harness/experiment.hpp"
#include "affordlab/label/probe.hpp"
#include "affordlab/learn/checkpoint.hpp"
#include "oracles.hpp"
#include "scripted.hpp"
#include "tiny_plan.hpp"

namespace {

using namespace affordlab;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  std::printf("criterion %d %s: %s (%s)\n", id, name.c_str(), pass ? "PASS" : "FAIL",
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// numerical suite pieces; each returns true on success and appends a note

bool check_gae(std::string& note) {
  Rng rng(2024);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto n = static_cast<std::size_t>(1 + rng.uniform_index(20));
    std::vector<double> r(n), v(n);
    std::vector<std::uint8_t> d(n);
    for (std::size_t i = 0; i < n; ++i) {
      r[i] = rng.uniform(-1.0, 1.0);
      v[i] = rng.normal();
      d[i] = rng.uniform() < 0.15 ? 1 : 0;
    }
    const double boot = rng.normal();
    const double gamma = rng.uniform(0.8, 1.0);
    const double lambda = rng.uniform(0.0, 1.0);
    const auto got = learn::compute_gae(r, v, d, boot, gamma, lambda);
    const auto want = testing::brute_force_gae(r, v, d, boot, gamma, lambda);
    for (std::size_t i = 0; i < n; ++i) {
      worst = std::max(worst, std::abs(got.advantages[i] - want.advantages[i]));
      worst = std::max(worst, std::abs(got.returns[i] - want.returns[i]));
    }
  }
  note += "gae max err " + fmt("%.1e", worst);
  return worst <= 1e-10;
}

bool check_backprop(std::string& note) {
  learn::PpoConfig cfg;
  cfg.entropy_coef = 0.01;
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    worst = std::max(worst, testing::max_gradient_error(testing::make_tiny_problem(seed), cfg));
  }
  note += ", backprop rel err " + fmt("%.1e", worst);
  return worst <= 1e-4;
}

bool check_surrogate(std::string& note) {
  testing::TinyProblem p = testing::make_tiny_problem(7);
  for (Eigen::Index i = 0; i < p.batch.size(); ++i) {
    const Eigen::VectorXd mean = p.agent.policy.mean_net.forward_one(p.batch.observations.col(i));
    p.batch.log_probs[i] =
        learn::gaussian_log_prob(mean, p.agent.policy.log_std, p.batch.raw_actions.col(i));
  }
  learn::normalize_advantages(p.batch.advantages);
  const auto loss =
      learn::ppo_loss(p.agent.policy, p.agent.value, p.batch, p.indices, {}, nullptr);
  bool ok = std::abs(loss.policy_loss) <= 1e-12;
  for (double a : {0.1, 1.0, 3.5}) {
    ok = ok && std::abs(learn::clipped_surrogate(2.0, a, 0.2) - 1.2 * a) <= 1e-15;
  }
  note += ok ? ", surrogate ok" : ", surrogate wrong";
  return ok;
}

bool check_rewards(std::string& note) {
  env::EnvConfig cfg;
  Rng rng(17);
  bool ok = true;
  for (int episode = 0; episode < 60; ++episode) {
    env::WidgetEnv env(cfg, 500 + episode);
    env.reset(static_cast<sim::WidgetKind>(episode % 3));
    const bool scripted = episode % 2 == 0;
    double completions = 0.0;
    while (env.active()) {
      sim::JointVector a;
      if (scripted) {
        a = testing::push_toward(env, episode % 3 == 1 ? testing::slide_target(env, env.step_count())
                                                       : testing::press_target(env, env.step_count()));
      } else {
        for (int j = 0; j < sim::kNumJoints; ++j) a[j] = rng.uniform(-200.0, 200.0);
      }
      const auto r = env.step(a).reward;
      ok = ok && r.total >= -0.02 && r.total <= 1.0;
      ok = ok && r.distance_penalty >= -0.01 && r.distance_penalty <= 0.0;
      ok = ok && r.movement_penalty >= -0.01 && r.movement_penalty <= 0.0;
      completions += r.completion;
    }
    ok = ok && completions <= 1.0;
  }
  note += ok ? ", reward bounds ok" : ", reward bounds violated";
  return ok;
}

bool check_replay(std::string& note) {
  env::EnvConfig cfg;
  bool ok = true;
  for (int i = 0; i < 6; ++i) {
    env::WidgetEnv env(cfg, 900 + i);
    env.reset(static_cast<sim::WidgetKind>(i % 3));
    const env::Trajectory t = i % 3 == 1 ? testing::record_scripted(env, testing::slide_target)
                                         : testing::record_scripted(env, testing::press_target);
    std::stringstream ss;
    env::write_trajectory(ss, t);
    const auto r = env::replay_trajectory(cfg, env::read_trajectory(ss));
    ok = ok && r.match;
  }
  note += ok ? ", replay bitwise" : ", replay mismatch";
  return ok;
}

bool check_physics(std::string& note) {
  env::EnvConfig cfg;
  bool ok = true;
  // passivity: kinetic energy never grows without motor input or contact
  {
    const auto spec =
        env::make_widget(sim::WidgetKind::kButton, 0.04, 0.04, sim::Vec3(-0.5, 0.5, 0), {});
    Rng rng(5);
    sim::ArmState s;
    s.angles = cfg.arm.rest_angles;
    for (int j = 0; j < sim::kNumJoints; ++j) s.velocities[j] = rng.uniform(-0.5, 0.5);
    sim::WidgetState w;
    double ke = sim::kinetic_energy(cfg.arm, s);
    for (int t = 0; t < 200; ++t) {
      const auto r = sim::step_dynamics(cfg.arm, cfg.contact, s, spec, w,
                                        sim::JointVector::Zero(), cfg.dt);
      const double next = sim::kinetic_energy(cfg.arm, r.arm);
      ok = ok && next <= ke + 1e-15;
      ke = next;
      s = r.arm;
      w = r.widget;
    }
  }
  // rail: slider handle never leaves its axis or rail
  double rail_err = 0.0;
  for (int i = 0; i < 6; ++i) {
    env::WidgetEnv env(cfg, 40 + i);
    env.reset(sim::WidgetKind::kSlider);
    const auto& spec = env.widget_spec();
    while (env.active()) {
      env.step(testing::push_toward(env, testing::slide_target(env, env.step_count()), 2000.0));
      const double d = env.widget_state().displacement;
      const sim::Vec3 off = spec.handle_center(d) - spec.rest_handle_center();
      rail_err = std::max({rail_err, std::abs(off.x()), std::abs(off.z()),
                           spec.rail_lower - d, d - spec.rail_upper});
    }
  }
  ok = ok && rail_err <= 1e-9;
  // trigger: exactly at 0.02, not one ulp before
  {
    auto spec = env::make_widget(sim::WidgetKind::kButton, 0.04, 0.04, sim::Vec3(-0.5, 0.5, 0), {});
    spec.spring_k = 0.0;
    spec.handle_damping = 0.0;
    sim::ArmState s;
    s.angles = cfg.arm.rest_angles;
    sim::WidgetState below, at;
    below.displacement = std::nextafter(0.02, 0.0);
    at.displacement = 0.02;
    ok = ok && !sim::step_dynamics(cfg.arm, cfg.contact, s, spec, below, sim::JointVector::Zero(),
                                   cfg.dt).widget.triggered;
    ok = ok && sim::step_dynamics(cfg.arm, cfg.contact, s, spec, at, sim::JointVector::Zero(),
                                  cfg.dt).widget.triggered;
  }
  // penetration under maximal pushing
  double depth = 0.0;
  for (int k = 0; k < 3; ++k) {
    env::WidgetEnv env(cfg, 60 + k);
    env.reset(static_cast<sim::WidgetKind>(k));
    const sim::Vec3 target = env.widget_spec().rest_handle_center() - sim::Vec3(0, 0, 0.5);
    while (env.active()) {
      depth = std::max(depth, env.step(testing::push_toward(env, target, 1e5)).contact.max_penetration);
    }
  }
  ok = ok && depth <= 0.002;
  note += ", physics " + std::string(ok ? "ok" : "violated") + " (rail err " +
          fmt("%.1e", rail_err) + ", penetration " + fmt("%.2f mm", depth * 1000) + ")";
  return ok;
}

bool check_probe_purity(const learn::Agent& agent, const label::ClassifierParams& clf,
                        std::string& note) {
  const auto before = learn::agent_hash(agent);
  label::probe_affordance(agent, {}, sim::WidgetKind::kDeceptive, 10, clf, 3);
  const bool ok = learn::agent_hash(agent) == before;
  note += ok ? ", probe pure" : ", probe mutated the agent";
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  namespace fs = std::filesystem;
  const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_out");
  fs::remove_all(root);
  const fs::path cfg_path = fs::path(AFFORDLAB_SOURCE_DIR) / "configs" / "base.cfg";

  harness::ExperimentPlan plan = config::load_plan(cfg_path);
  plan.threads = 1;
  plan.provenance = harness::provenance_stamp(config::dump_plan(plan));
  std::printf("config %s\nprovenance %s\n", cfg_path.c_str(), plan.provenance.c_str());

  // criterion 1: Phase 1 training
  const harness::OutputLayout run_a{root / "run_a"};
  auto t0 = Clock::now();
  const harness::PhaseResult p1 = harness::run_phase1(plan, run_a);
  const double p1_seconds = seconds_since(t0);
  const auto final_eval = harness::final_evaluation(
      p1.agent, plan, plan.phase1.eval_kinds, plan.final_eval_episodes);
  {
    const double button = final_eval.at(sim::WidgetKind::kButton);
    const double slider = final_eval.at(sim::WidgetKind::kSlider);
    const bool pass = plan.phase1.updates <= 300 && p1_seconds <= 7200.0 && button >= 0.8 &&
                      slider >= 0.8 && plan.final_eval_episodes >= 200;
    report(1, "phase 1 training", pass,
           std::to_string(plan.phase1.updates) + " updates in " + fmt("%.0f s", p1_seconds) +
               ", button " + fmt("%.3f", button) + ", slider " + fmt("%.3f", slider) + " over " +
               std::to_string(plan.final_eval_episodes) + " episodes each");
  }

  // criterion 2: labeled dataset and classifier
  t0 = Clock::now();
  const harness::DatasetResult dataset = harness::collect_labeled_dataset(p1.agent, plan);
  const label::TrainedClassifier clf = harness::train_plan_classifier(dataset.data, plan);
  const double clf_seconds = seconds_since(t0);
  {
    const auto& r = clf.report;
    const double rp = r.recall(label::Label::kPress);
    const double rs = r.recall(label::Label::kSlide);
    const bool pass = plan.dataset.per_class >= 500 && dataset.data.size() == 1000 &&
                      r.train_size == 800 && r.val_size == 100 && r.test_size == 100 &&
                      r.test_accuracy >= 0.85 && rp >= 0.75 && rs >= 0.75 && clf_seconds <= 300.0;
    report(2, "affordance classifier", pass,
           "test accuracy " + fmt("%.3f", r.test_accuracy) + ", recall press " + fmt("%.3f", rp) +
               ", slide " + fmt("%.3f", rs) + ", split " + std::to_string(r.train_size) + "/" +
               std::to_string(r.val_size) + "/" + std::to_string(r.test_size) + ", " +
               fmt("%.0f s", clf_seconds));
  }

  // criterion 3: deceptive widget adaptation
  t0 = Clock::now();
  const harness::PhaseResult p2 =
      harness::run_phase2_adaptation(p1.agent, clf.params, plan, run_a);
  const double p2_seconds = seconds_since(t0);
  {
    const auto& rows = p2.rows;
    bool pass = !rows.empty() && rows.front().update == 0 && rows.front().p_slide.has_value();
    const double slide0 = pass ? *rows.front().p_slide : 0.0;
    pass = pass && slide0 > 0.5;
    int reached = -1;
    int crossover = -1;
    for (const auto& row : rows) {
      if (!row.p_press) continue;
      if (crossover < 0 && *row.p_press > *row.p_slide) crossover = row.update;
      if (reached < 0 && row.update <= 60 && row.success_deceptive &&
          *row.success_deceptive >= 0.8 && *row.p_press >= 0.8) {
        reached = row.update;
      }
    }
    const int last = rows.empty() ? 0 : rows.back().update;
    const int quarter_start = last - last / 4;
    bool dominant = true;
    for (const auto& row : rows) {
      if (row.update >= quarter_start && row.p_press && !(*row.p_press > *row.p_slide)) {
        dominant = false;
      }
    }
    pass = pass && reached >= 0 && crossover > 0 && dominant && p2_seconds <= 3600.0;
    report(3, "deceptive adaptation", pass,
           "p_slide at update 0 " + fmt("%.2f", slide0) + ", success and p_press >= 0.8 at update " +
               std::to_string(reached) + ", crossover at update " + std::to_string(crossover) +
               ", press dominant over updates " + std::to_string(quarter_start) + "-" +
               std::to_string(last) + (dominant ? "" : " violated") + ", " +
               fmt("%.0f s", p2_seconds));
  }

  // criterion 4: numerical suite
  t0 = Clock::now();
  {
    std::string note;
    bool pass = check_gae(note);
    pass = check_backprop(note) && pass;
    pass = check_surrogate(note) && pass;
    pass = check_rewards(note) && pass;
    pass = check_replay(note) && pass;
    pass = check_physics(note) && pass;
    pass = check_probe_purity(p1.agent, clf.params, note) && pass;
    const double secs = seconds_since(t0);
    pass = pass && secs <= 300.0;
    report(4, "numerical suite", pass, note + ", " + fmt("%.0f s", secs));
  }

  // criterion 5: determinism of Phase 1 metric logs
  {
    const harness::OutputLayout run_b{root / "run_b"};
    harness::run_phase1(plan, run_b);
    const std::string a = testing::slurp(run_a.phase1_metrics());
    const std::string b = testing::slurp(run_b.phase1_metrics());
    report(5, "deterministic rerun", !a.empty() && a == b,
           a == b ? "phase1.csv byte-identical across two runs"
                  : "phase1.csv differs between runs");
  }

  harness::emit_plot_data(run_a, plan.provenance);
  std::printf("%s\n", failures == 0 ? "ALL CRITERIA PASS" : "SOME CRITERIA FAILED");
  return failures == 0 ? 0 : 1;
}
