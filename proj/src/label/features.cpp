#include "affordlab/label/features.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace affordlab::label {

namespace {

// widget bases are axis aligned with the world: length along x, width along y
const sim::Vec3 kPressAxis{0.0, 0.0, -1.0};
const sim::Vec3 kSlideAxis{0.0, 1.0, 0.0};

sim::Vec3 to_base_frame(const sim::Vec3& world_offset) { return world_offset; }

}  // namespace

double interpolate(const std::vector<double>& times, const std::vector<double>& values, double t) {
  if (times.empty() || times.size() != values.size()) {
    throw std::invalid_argument("interpolate: bad knots");
  }
  if (t <= times.front()) return values.front();
  if (t >= times.back()) return values.back();
  // first knot strictly after t
  const auto hi = static_cast<std::size_t>(
      std::upper_bound(times.begin(), times.end(), t) - times.begin());
  const std::size_t lo = hi - 1;
  const double span = times[hi] - times[lo];
  if (span <= 0.0) return values[hi];
  const double a = (t - times[lo]) / span;
  return values[lo] + a * (values[hi] - values[lo]);
}

FeatureVector featurize(const std::vector<env::MotionSample>& motion, const sim::WidgetSpec& spec) {
  if (motion.size() < 2) {
    throw std::invalid_argument("featurize: trajectory needs at least two motion samples");
  }
  const double t0 = motion.front().time;
  const double t1 = motion.back().time;
  if (!(t1 > t0)) throw std::invalid_argument("featurize: trajectory has zero duration");

  const sim::Vec3 anchor = spec.rest_handle_center();
  std::vector<double> times;
  std::array<std::vector<double>, 3> coords;
  times.reserve(motion.size());
  for (const auto& s : motion) {
    if (!times.empty() && s.time < times.back()) {
      throw std::invalid_argument("featurize: motion timestamps must be non-decreasing");
    }
    // a repeated timestamp replaces the previous knot
    const sim::Vec3 rel = to_base_frame(s.fingertip_mid - anchor);
    if (!times.empty() && s.time == times.back()) {
      for (int k = 0; k < 3; ++k) coords[k].back() = rel(k);
      continue;
    }
    times.push_back(s.time);
    for (int k = 0; k < 3; ++k) coords[k].push_back(rel(k));
  }

  FeatureVector f(kFeatureSize);
  for (int i = 0; i < kResampleSteps; ++i) {
    const double t = t0 + (t1 - t0) * i / (kResampleSteps - 1);
    for (int k = 0; k < 3; ++k) f(3 * i + k) = interpolate(times, coords[k], t);
  }
  const sim::Vec3 moved = motion.back().handle_center - anchor;
  int idx = 3 * kResampleSteps;
  f(idx++) = moved.dot(kPressAxis);
  f(idx++) = moved.dot(kSlideAxis);

  // mean joint speed over distinct timestamps
  sim::JointVector speed = sim::JointVector::Zero();
  int count = 0;
  for (std::size_t i = 1; i < motion.size(); ++i) {
    if (motion[i].time == motion[i - 1].time) continue;
    speed += motion[i].joint_velocities.cwiseAbs();
    ++count;
  }
  speed /= std::max(count, 1);
  for (int j = 0; j < sim::kNumJoints; ++j) f(idx++) = speed(j);
  return f;
}

FeatureVector featurize(const env::Trajectory& traj) { return featurize(traj.motion, traj.widget); }

}  // namespace affordlab::label
