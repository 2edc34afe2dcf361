#include "affordlab/sim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace affordlab::sim {

void ContactConfig::validate() const {
  if (!(stiffness > 0.0) || !(table_stiffness > 0.0) || damping < 0.0 || table_damping < 0.0) {
    throw std::invalid_argument("contact stiffness must be positive and damping non-negative");
  }
  if (!(max_substep > 0.0)) {
    throw std::invalid_argument("max_substep must be positive");
  }
}

BoxQuery query_handle_box(const WidgetSpec& spec, double displacement, const Vec3& point) {
  const Vec3 half(0.5 * spec.handle_dims.y(), 0.5 * spec.handle_dims.x(),
                  0.5 * spec.handle_dims.z());
  const Vec3 local = point - spec.handle_center(displacement);
  const Vec3 clamped = local.cwiseMax(-half).cwiseMin(half);
  const Vec3 gap = local - clamped;
  BoxQuery q;
  const double gap_norm = gap.norm();
  if (gap_norm > 0.0) {
    q.distance = gap_norm;
    q.normal = gap / gap_norm;
    return q;
  }
  // inside: exit through the nearest face
  const Vec3 depth = half - local.cwiseAbs();
  int axis = 0;
  depth.minCoeff(&axis);
  q.distance = -depth[axis];
  q.normal = Vec3::Zero();
  q.normal[axis] = local[axis] >= 0.0 ? 1.0 : -1.0;
  return q;
}

namespace {

struct ContactForces {
  std::array<Vec3, 2> on_tip;  // total force on each fingertip
  Vec3 handle_on_tips = Vec3::Zero();
  double axial_on_handle = 0.0;
  double min_distance = 0.0;
  double max_penetration = 0.0;
  bool touching = false;
};

ContactForces compute_contacts(const ArmConfig& config, const ContactConfig& cc,
                               const ArmPose& pose,
                               const std::array<Vec3, 2>& tip_vel,
                               const WidgetSpec& spec, const WidgetState& widget) {
  ContactForces out;
  const double r = config.fingertip_radius;
  const Vec3 handle_vel = widget.velocity * spec.travel_axis;
  out.min_distance = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 2; ++i) {
    Vec3 force = Vec3::Zero();
    const Vec3& tip = pose.fingertips[i];

    const BoxQuery q = query_handle_box(spec, widget.displacement, tip);
    const double surface_gap = q.distance - r;
    out.min_distance = std::min(out.min_distance, surface_gap);
    if (surface_gap < 0.0) {
      const double pen = -surface_gap;
      out.max_penetration = std::max(out.max_penetration, pen);
      const double vn = (tip_vel[i] - handle_vel).dot(q.normal);
      const double fn = std::max(0.0, cc.stiffness * pen - cc.damping * vn);
      const Vec3 f = fn * q.normal;
      force += f;
      out.handle_on_tips += f;
      out.axial_on_handle -= f.dot(spec.travel_axis);
      out.touching = true;
    }

    const double table_pen = r - tip.z();
    if (table_pen > 0.0) {
      const double fn =
          std::max(0.0, cc.table_stiffness * table_pen - cc.table_damping * tip_vel[i].z());
      force.z() += fn;
    }
    out.on_tip[i] = force;
  }
  return out;
}

void require_finite(const ArmState& arm, const WidgetState& widget, const JointVector& forces) {
  if (!arm.angles.allFinite() || !arm.velocities.allFinite() || !forces.allFinite() ||
      !std::isfinite(widget.displacement) || !std::isfinite(widget.velocity)) {
    throw std::invalid_argument("step_dynamics: non-finite input");
  }
}

}  // namespace

ContactReport measure_contact(const ArmConfig& config, const ContactConfig& contact,
                              const ArmState& arm, const WidgetSpec& spec,
                              const WidgetState& widget) {
  const ArmPose pose = forward_kinematics(config, arm.angles);
  std::array<Vec3, 2> tip_vel;
  for (int i = 0; i < 2; ++i) {
    tip_vel[i] = fingertip_jacobian(config, pose, arm.angles, i) * arm.velocities;
  }
  const ContactForces cf = compute_contacts(config, contact, pose, tip_vel, spec, widget);
  ContactReport report;
  report.fingertip_pos = pose.fingertips;
  report.min_distance = cf.min_distance;
  report.contact_force = cf.handle_on_tips;
  report.max_penetration = cf.max_penetration;
  report.touching = cf.touching;
  return report;
}

StepResult step_dynamics(const ArmConfig& config, const ContactConfig& contact,
                         const ArmState& arm, const WidgetSpec& spec,
                         const WidgetState& widget, const JointVector& forces,
                         double dt) {
  require_finite(arm, widget, forces);
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("step_dynamics: dt must be positive");
  }
  if ((forces.array().abs() > config.max_force).any()) {
    throw std::invalid_argument("step_dynamics: motor force outside [-max_force, max_force]");
  }

  StepResult out{arm, widget, {}};
  const int substeps = std::max(1, static_cast<int>(std::ceil(dt / contact.max_substep - 1e-9)));
  const double h = dt / substeps;
  const JointVector motor = config.motor_gear.cwiseProduct(forces);
  double max_pen = 0.0;

  for (int s = 0; s < substeps; ++s) {
    ArmState& a = out.arm;
    WidgetState& w = out.widget;
    const ArmPose pose = forward_kinematics(config, a.angles);
    std::array<Eigen::Matrix<double, 3, kNumJoints>, 2> jac;
    std::array<Vec3, 2> tip_vel;
    for (int i = 0; i < 2; ++i) {
      jac[i] = fingertip_jacobian(config, pose, a.angles, i);
      tip_vel[i] = jac[i] * a.velocities;
    }
    const ContactForces cf = compute_contacts(config, contact, pose, tip_vel, spec, w);
    max_pen = std::max(max_pen, cf.max_penetration);

    // arm: semi-implicit Euler on independent damped joints
    JointVector torque = motor - config.joint_damping.cwiseProduct(a.velocities);
    for (int i = 0; i < 2; ++i) torque += jac[i].transpose() * cf.on_tip[i];
    a.velocities += h * torque.cwiseQuotient(config.joint_inertia);
    a.angles += h * a.velocities;
    enforce_joint_limits(config, a);

    // handle: one-dimensional mechanism along its travel axis
    const double f = cf.axial_on_handle + widget_restoring_force(spec, w) -
                     spec.handle_damping * w.velocity;
    w.velocity += h * f / spec.handle_mass;
    w.displacement += h * w.velocity;
    if (w.displacement <= spec.rail_lower) {
      w.displacement = spec.rail_lower;
      if (w.velocity < 0.0) w.velocity = 0.0;
    } else if (w.displacement >= spec.rail_upper) {
      w.displacement = spec.rail_upper;
      if (w.velocity > 0.0) w.velocity = 0.0;
    }
    if (w.displacement >= spec.goal_displacement) w.triggered = true;
  }

  out.contact = measure_contact(config, contact, out.arm, spec, out.widget);
  out.contact.max_penetration = std::max(max_pen, out.contact.max_penetration);
  return out;
}

}  // namespace affordlab::sim
