#include "affordlab/sim/arm.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace affordlab::sim {

namespace {

Mat3 rot_x(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 r;
  r << 1, 0, 0,
       0, c, -s,
       0, s, c;
  return r;
}

Mat3 rot_y(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 r;
  r << c, 0, s,
       0, 1, 0,
       -s, 0, c;
  return r;
}

Mat3 rot_z(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 r;
  r << c, -s, 0,
       s, c, 0,
       0, 0, 1;
  return r;
}

}  // namespace

void ArmConfig::validate() const {
  if (!(upper_arm_len > 0.0) || !(forearm_len > 0.0) || !(finger_len > 0.0)) {
    throw std::invalid_argument("arm segment lengths must be positive");
  }
  if (!(fingertip_radius > 0.0)) {
    throw std::invalid_argument("fingertip radius must be positive");
  }
  if (!(max_force > 0.0)) {
    throw std::invalid_argument("max_force must be positive");
  }
  if (!shoulder_pos.allFinite()) {
    throw std::invalid_argument("shoulder position must be finite");
  }
  for (int j = 0; j < kNumJoints; ++j) {
    const auto& lim = joint_limits[j];
    if (!(lim.lower < lim.upper)) {
      throw std::invalid_argument("joint " + std::to_string(j) +
                                  ": lower limit must be below upper limit");
    }
    if (!(joint_inertia[j] > 0.0)) {
      throw std::invalid_argument("joint " + std::to_string(j) + ": inertia must be positive");
    }
    if (!(joint_damping[j] >= 0.0)) {
      throw std::invalid_argument("joint " + std::to_string(j) + ": damping must be >= 0");
    }
    if (!(motor_gear[j] > 0.0)) {
      throw std::invalid_argument("joint " + std::to_string(j) + ": motor gear must be positive");
    }
    if (!(rest_angles[j] >= lim.lower && rest_angles[j] <= lim.upper)) {
      throw std::invalid_argument("joint " + std::to_string(j) + ": rest angle outside limits");
    }
  }
}

ArmPose forward_kinematics(const ArmConfig& config, const JointVector& angles) {
  if (!angles.allFinite()) {
    throw std::invalid_argument("forward_kinematics: non-finite joint angle");
  }
  ArmPose pose;
  const Vec3 ex = Vec3::UnitX();

  const Mat3 r_yaw = rot_z(angles[kShoulderYaw]);
  const Mat3 r_upper = r_yaw * rot_y(angles[kShoulderPitch]);
  pose.upper_arm = {config.shoulder_pos, r_upper};
  pose.joint_axes[kShoulderYaw] = Vec3::UnitZ();
  pose.joint_points[kShoulderYaw] = config.shoulder_pos;
  pose.joint_axes[kShoulderPitch] = r_yaw.col(1);
  pose.joint_points[kShoulderPitch] = config.shoulder_pos;

  const Vec3 elbow = config.shoulder_pos + config.upper_arm_len * (r_upper * ex);
  const Mat3 r_fore_pitch = r_upper * rot_y(angles[kElbow]);
  const Mat3 r_fore = r_fore_pitch * rot_x(angles[kForearmRoll]);
  pose.forearm = {elbow, r_fore};
  pose.joint_axes[kElbow] = r_upper.col(1);
  pose.joint_points[kElbow] = elbow;
  pose.joint_axes[kForearmRoll] = r_fore_pitch.col(0);
  pose.joint_points[kForearmRoll] = elbow;

  const Vec3 wrist = elbow + config.forearm_len * (r_fore * ex);
  const Mat3 r_hand_pitch = r_fore * rot_y(angles[kWristPitch]);
  const Mat3 r_hand = r_hand_pitch * rot_z(angles[kWristYaw]);
  pose.hand = {wrist, r_hand};
  pose.joint_axes[kWristPitch] = r_fore.col(1);
  pose.joint_points[kWristPitch] = wrist;
  pose.joint_axes[kWristYaw] = r_hand_pitch.col(2);
  pose.joint_points[kWristYaw] = wrist;

  // grip spreads the fingers sideways without moving their midpoint
  const double spread = config.finger_len * std::sin(angles[kGrip]);
  const Vec3 reach = wrist + config.finger_len * r_hand.col(0);
  pose.fingertips[0] = reach + spread * r_hand.col(1);
  pose.fingertips[1] = reach - spread * r_hand.col(1);
  pose.fingertip_mid = reach;
  pose.joint_axes[kGrip] = r_hand.col(1);
  pose.joint_points[kGrip] = wrist;
  return pose;
}

Eigen::Matrix<double, 3, kNumJoints> fingertip_jacobian(const ArmConfig& config,
                                                        const ArmPose& pose,
                                                        const JointVector& angles,
                                                        int finger) {
  Eigen::Matrix<double, 3, kNumJoints> jac;
  const Vec3& tip = pose.fingertips[finger];
  for (int j = 0; j < kGrip; ++j) {
    jac.col(j) = pose.joint_axes[j].cross(tip - pose.joint_points[j]);
  }
  const double sign = finger == 0 ? 1.0 : -1.0;
  jac.col(kGrip) = sign * config.finger_len * std::cos(angles[kGrip]) * pose.joint_axes[kGrip];
  return jac;
}

void enforce_joint_limits(const ArmConfig& config, ArmState& state) {
  for (int j = 0; j < kNumJoints; ++j) {
    const auto& lim = config.joint_limits[j];
    if (state.angles[j] <= lim.lower) {
      state.angles[j] = lim.lower;
      if (state.velocities[j] < 0.0) state.velocities[j] = 0.0;
    } else if (state.angles[j] >= lim.upper) {
      state.angles[j] = lim.upper;
      if (state.velocities[j] > 0.0) state.velocities[j] = 0.0;
    }
  }
}

double kinetic_energy(const ArmConfig& config, const ArmState& state) {
  return 0.5 * (config.joint_inertia.array() * state.velocities.array().square()).sum();
}

}  // namespace affordlab::sim
