#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "affordlab/env/mdp.hpp"
#include "affordlab/env/widget_env.hpp"

namespace affordlab::env {

// Current trajectory file schema. Readers reject other versions.
inline constexpr int kTrajectorySchemaVersion = 1;
inline constexpr const char* kTrajectorySchemaName = "affordlab.trajectory";

// Kinematic snapshot used for motion featurization. One sample is taken at
// reset and one after every step.
struct MotionSample {
  double time = 0.0;
  sim::Vec3 fingertip_mid = sim::Vec3::Zero();
  sim::Vec3 handle_center = sim::Vec3::Zero();
  double displacement = 0.0;
  sim::JointVector joint_velocities = sim::JointVector::Zero();
};

struct StepRecord {
  int t = 0;
  ObservationVector observation = ObservationVector::Zero();  // before the action
  sim::JointVector action = sim::JointVector::Zero();         // applied motor forces
  RewardBreakdown reward;
  double log_prob = 0.0;
  double value = 0.0;
  bool done = false;
};

struct Trajectory {
  std::uint64_t episode_id = 0;
  sim::WidgetSpec widget;
  std::vector<StepRecord> steps;
  std::vector<MotionSample> motion;
  bool success = false;
  std::string provenance;  // optional stamp written into the header

  std::vector<double> reward_totals() const;
};

// Line-delimited JSON: a header record followed by one record per step.
void write_trajectory(std::ostream& out, const Trajectory& traj);
void save_trajectory(const std::filesystem::path& path, const Trajectory& traj);
// throws std::runtime_error on schema or parse errors
Trajectory read_trajectory(std::istream& in);
Trajectory load_trajectory(const std::filesystem::path& path);

struct ReplayResult {
  bool match = false;
  // index of the first step whose reward differs, or -1
  int first_mismatch = -1;
  std::vector<double> rewards;
};

// Re-executes the stored actions from a reset on the stored widget and
// compares the reward stream bit for bit. A length difference also counts as
// a mismatch.
ReplayResult replay_trajectory(const EnvConfig& config, const Trajectory& traj);

}  // namespace affordlab::env
