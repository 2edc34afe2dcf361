#pragma once

#include <array>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace affordlab::sim {

inline constexpr int kNumJoints = 7;

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using JointVector = Eigen::Matrix<double, kNumJoints, 1>;

// Joint order and axis conventions.
//
// The zero pose points the whole chain along world +x from the shoulder.
// World z is up. A positive pitch rotation (about the local y axis) swings
// the distal link downward.
//
//   0 shoulder yaw     about world z at the shoulder
//   1 shoulder pitch   about the yawed y axis at the shoulder
//   2 elbow            pitch about the upper-arm y axis at the elbow
//   3 forearm roll     about the forearm axis
//   4 wrist pitch      about the rolled forearm y axis at the wrist
//   5 wrist yaw        about the pitched hand z axis at the wrist
//   6 grip             spreads the two fingers symmetrically along hand y
enum Joint : int {
  kShoulderYaw = 0,
  kShoulderPitch = 1,
  kElbow = 2,
  kForearmRoll = 3,
  kWristPitch = 4,
  kWristYaw = 5,
  kGrip = 6,
};

struct JointLimit {
  double lower = 0.0;
  double upper = 0.0;
};

struct ArmConfig {
  double upper_arm_len = 0.24;
  double forearm_len = 0.27;
  double finger_len = 0.06;
  double fingertip_radius = 0.006;
  Vec3 shoulder_pos{0.0, 0.0, 0.30};
  std::array<JointLimit, kNumJoints> joint_limits{{
      {-1.2, 1.2},   // shoulder yaw
      {-1.4, 1.6},   // shoulder pitch
      {0.0, 2.6},    // elbow flexion
      {-1.6, 1.6},   // forearm roll
      {-1.4, 1.4},   // wrist pitch
      {-0.8, 0.8},   // wrist yaw
      {0.0, 0.6},    // grip spread
  }};
  double max_force = 200.0;
  // joint torque (N m) produced per unit of motor force
  JointVector motor_gear =
      (JointVector() << 0.01, 0.01, 0.008, 0.002, 0.003, 0.003, 0.001).finished();
  JointVector joint_damping =
      (JointVector() << 0.6, 0.6, 0.45, 0.1, 0.15, 0.15, 0.05).finished();
  JointVector joint_inertia =
      (JointVector() << 0.03, 0.03, 0.02, 0.005, 0.006, 0.006, 0.0025).finished();
  // starting configuration: fingertips hovering above the placement area
  JointVector rest_angles =
      (JointVector() << 0.0, -0.5, 1.733, 0.0, 0.338, 0.0, 0.3).finished();

  // throws std::invalid_argument describing the first violated invariant
  void validate() const;
};

struct ArmState {
  JointVector angles = JointVector::Zero();
  JointVector velocities = JointVector::Zero();
};

struct LinkPose {
  Vec3 origin = Vec3::Zero();
  Mat3 rotation = Mat3::Identity();
};

struct ArmPose {
  LinkPose upper_arm;  // origin at the shoulder
  LinkPose forearm;    // origin at the elbow
  LinkPose hand;       // origin at the wrist
  std::array<Vec3, 2> fingertips;
  Vec3 fingertip_mid = Vec3::Zero();
  // world-frame joint axis and a point on it, for the revolute joints
  std::array<Vec3, kNumJoints> joint_axes;
  std::array<Vec3, kNumJoints> joint_points;
};

// throws std::invalid_argument on non-finite angles
ArmPose forward_kinematics(const ArmConfig& config, const JointVector& angles);

// d(fingertip position)/d(angles) for finger 0 or 1
Eigen::Matrix<double, 3, kNumJoints> fingertip_jacobian(const ArmConfig& config,
                                                        const ArmPose& pose,
                                                        const JointVector& angles,
                                                        int finger);

// clamps angles into the joint box and zeroes velocity components that hit a limit
void enforce_joint_limits(const ArmConfig& config, ArmState& state);

double kinetic_energy(const ArmConfig& config, const ArmState& state);

}  // namespace affordlab::sim
