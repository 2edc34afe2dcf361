#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "affordlab/harness/experiment.hpp"

namespace affordlab::testing {

// Same pipeline as the default plan, shrunk so a full run takes seconds.
inline harness::ExperimentPlan tiny_plan(std::uint64_t seed = 1) {
  harness::ExperimentPlan plan = harness::default_plan(seed);
  plan.ppo.steps_per_update = 120;
  plan.ppo.minibatch_size = 60;
  plan.ppo.epochs_per_update = 1;
  for (auto* phase : {&plan.phase1, &plan.phase2}) {
    phase->updates = 2;
    phase->num_envs = 4;
    phase->eval_episodes = 2;
    phase->checkpoint_every = 0;
    phase->probe_rollouts = 2;
  }
  plan.final_eval_episodes = 2;
  plan.dataset.per_class = 2;
  return plan;
}

inline std::filesystem::path fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("affordlab_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace affordlab::testing
