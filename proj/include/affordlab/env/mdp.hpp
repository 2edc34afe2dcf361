#pragma once

#include <cstdint>
#include <span>

#include <Eigen/Core>

#include "affordlab/sim/dynamics.hpp"

namespace affordlab::env {

inline constexpr int kObservationSize = 28;
using ObservationVector = Eigen::Matrix<double, kObservationSize, 1>;

// The agent's view of one time step. handle_velocity is the mechanism-axis
// velocity embedded in the world frame.
struct Observation {
  sim::JointVector angles = sim::JointVector::Zero();
  sim::JointVector velocities = sim::JointVector::Zero();
  sim::Vec3 handle_dims = sim::Vec3::Zero();
  double base_width = 0.0;
  double base_length = 0.0;
  sim::Vec3 handle_center = sim::Vec3::Zero();
  sim::Vec3 base_center = sim::Vec3::Zero();
  sim::Vec3 handle_velocity = sim::Vec3::Zero();

  // layout: angles(7) velocities(7) handle_dims(3) base(2) handle_center(3)
  //         base_center(3) handle_velocity(3)
  ObservationVector to_vector() const;
};

Observation make_observation(const sim::ArmState& arm, const sim::WidgetSpec& spec,
                             const sim::WidgetState& widget);

struct RewardConfig {
  double distance_factor = 0.02;   // per metre
  double movement_factor = 0.005;  // per rad/s
};

struct RewardBreakdown {
  double distance_penalty = 0.0;
  double movement_penalty = 0.0;
  double completion = 0.0;
  double total = 0.0;
};

RewardBreakdown compute_reward(const RewardConfig& config, const sim::ContactReport& contact,
                               const sim::ArmState& arm, const sim::WidgetState& widget,
                               const sim::WidgetSpec& spec, bool already_triggered);

// sum_t discount^t * rewards[t]; throws on an empty sequence
double episode_return(std::span<const double> rewards, double discount = 0.99);

}  // namespace affordlab::env
