#pragma once

#include <Eigen/Core>

#include "affordlab/env/trajectory.hpp"

namespace affordlab::label {

inline constexpr int kResampleSteps = 16;
// 16 x 3 relative fingertip positions, 2 axis displacements, 7 joint speeds
inline constexpr int kFeatureSize = kResampleSteps * 3 + 2 + sim::kNumJoints;

using FeatureVector = Eigen::VectorXd;

// Fingertip-midpoint path relative to the handle's rest centre, expressed in
// the base frame (x along base length, y along base width, z up), resampled
// to kResampleSteps uniform times by linear interpolation; then the final
// handle displacement along the press axis (down) and the slide axis (+y);
// then the per-joint mean |joint velocity|.
//
// Samples sharing a timestamp collapse to one knot, so repeating samples
// does not change the result. Throws std::invalid_argument for fewer than two
// motion samples or a trajectory with zero duration.
FeatureVector featurize(const std::vector<env::MotionSample>& motion, const sim::WidgetSpec& spec);
FeatureVector featurize(const env::Trajectory& traj);

// Linear interpolation of (times, values) at `t`, clamped to the end knots.
// Times must be non-decreasing.
double interpolate(const std::vector<double>& times, const std::vector<double>& values, double t);

}  // namespace affordlab::label
