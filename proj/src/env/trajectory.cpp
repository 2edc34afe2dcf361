#include "affordlab/env/trajectory.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "affordlab/env/json_io.hpp"

namespace affordlab::env {

using nlohmann::json;

namespace {

std::string_view mechanism_name(sim::Mechanism m) {
  return m == sim::Mechanism::kPress ? "press" : "slide";
}

sim::Mechanism mechanism_from_name(const std::string& name) {
  if (name == "press") return sim::Mechanism::kPress;
  if (name == "slide") return sim::Mechanism::kSlide;
  throw std::runtime_error("unknown mechanism '" + name + "'");
}

}  // namespace

json to_json(const sim::WidgetSpec& spec) {
  return json{
      {"kind", std::string(sim::to_string(spec.kind))},
      {"mechanism", std::string(mechanism_name(spec.mechanism))},
      {"handle_dims", vector_to_json(spec.handle_dims)},
      {"base_dims", json::array({spec.base_dims.width, spec.base_dims.length})},
      {"origin", vector_to_json(spec.origin)},
      {"travel_axis", vector_to_json(spec.travel_axis)},
      {"spring_k", spec.spring_k},
      {"rail_limits", json::array({spec.rail_lower, spec.rail_upper})},
      {"goal_displacement", spec.goal_displacement},
      {"handle_mass", spec.handle_mass},
      {"handle_damping", spec.handle_damping},
      {"end_stop_k", spec.end_stop_k},
  };
}

sim::WidgetSpec widget_from_json(const json& j) {
  sim::WidgetSpec spec;
  spec.kind = sim::widget_kind_from_string(j.at("kind").get<std::string>());
  spec.mechanism = mechanism_from_name(j.at("mechanism").get<std::string>());
  vector_from_json(j.at("handle_dims"), spec.handle_dims);
  spec.base_dims = {j.at("base_dims").at(0).get<double>(), j.at("base_dims").at(1).get<double>()};
  vector_from_json(j.at("origin"), spec.origin);
  vector_from_json(j.at("travel_axis"), spec.travel_axis);
  spec.spring_k = j.at("spring_k").get<double>();
  spec.rail_lower = j.at("rail_limits").at(0).get<double>();
  spec.rail_upper = j.at("rail_limits").at(1).get<double>();
  spec.goal_displacement = j.at("goal_displacement").get<double>();
  spec.handle_mass = j.at("handle_mass").get<double>();
  spec.handle_damping = j.at("handle_damping").get<double>();
  spec.end_stop_k = j.at("end_stop_k").get<double>();
  spec.validate();
  return spec;
}

json to_json(const MotionSample& s) {
  return json{{"time", s.time},
              {"fingertip", vector_to_json(s.fingertip_mid)},
              {"handle_center", vector_to_json(s.handle_center)},
              {"displacement", s.displacement},
              {"joint_velocities", vector_to_json(s.joint_velocities)}};
}

MotionSample motion_from_json(const json& j) {
  MotionSample s;
  s.time = j.at("time").get<double>();
  vector_from_json(j.at("fingertip"), s.fingertip_mid);
  vector_from_json(j.at("handle_center"), s.handle_center);
  s.displacement = j.at("displacement").get<double>();
  vector_from_json(j.at("joint_velocities"), s.joint_velocities);
  return s;
}

std::vector<double> Trajectory::reward_totals() const {
  std::vector<double> out;
  out.reserve(steps.size());
  for (const auto& s : steps) out.push_back(s.reward.total);
  return out;
}

void write_trajectory(std::ostream& out, const Trajectory& traj) {
  if (traj.motion.size() != traj.steps.size() + 1) {
    throw std::invalid_argument("trajectory motion samples must number steps + 1");
  }
  json header{{"schema", kTrajectorySchemaName},
              {"version", kTrajectorySchemaVersion},
              {"episode_id", traj.episode_id},
              {"success", traj.success},
              {"num_steps", traj.steps.size()},
              {"widget", to_json(traj.widget)},
              {"motion", to_json(traj.motion.front())}};
  if (!traj.provenance.empty()) header["provenance"] = traj.provenance;
  out << header.dump() << '\n';
  for (std::size_t i = 0; i < traj.steps.size(); ++i) {
    const StepRecord& s = traj.steps[i];
    json rec{{"t", s.t},
             {"observation", vector_to_json(s.observation)},
             {"action", vector_to_json(s.action)},
             {"reward",
              {{"distance", s.reward.distance_penalty},
               {"movement", s.reward.movement_penalty},
               {"completion", s.reward.completion},
               {"total", s.reward.total}}},
             {"log_prob", s.log_prob},
             {"value", s.value},
             {"done", s.done},
             {"motion", to_json(traj.motion[i + 1])}};
    out << rec.dump() << '\n';
  }
}

void save_trajectory(const std::filesystem::path& path, const Trajectory& traj) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_trajectory(out, traj);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

Trajectory read_trajectory(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("trajectory: empty input");
  Trajectory traj;
  try {
    const json header = json::parse(line);
    if (header.at("schema").get<std::string>() != kTrajectorySchemaName) {
      throw std::runtime_error("trajectory: unexpected schema name");
    }
    const int version = header.at("version").get<int>();
    if (version != kTrajectorySchemaVersion) {
      throw std::runtime_error("trajectory: unsupported schema version " +
                               std::to_string(version));
    }
    traj.episode_id = header.at("episode_id").get<std::uint64_t>();
    traj.success = header.at("success").get<bool>();
    traj.widget = widget_from_json(header.at("widget"));
    traj.provenance = header.value("provenance", "");
    traj.motion.push_back(motion_from_json(header.at("motion")));
    const auto expected = header.at("num_steps").get<std::size_t>();
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const json rec = json::parse(line);
      StepRecord s;
      s.t = rec.at("t").get<int>();
      vector_from_json(rec.at("observation"), s.observation);
      vector_from_json(rec.at("action"), s.action);
      const json& r = rec.at("reward");
      s.reward.distance_penalty = r.at("distance").get<double>();
      s.reward.movement_penalty = r.at("movement").get<double>();
      s.reward.completion = r.at("completion").get<double>();
      s.reward.total = r.at("total").get<double>();
      s.log_prob = rec.at("log_prob").get<double>();
      s.value = rec.at("value").get<double>();
      s.done = rec.at("done").get<bool>();
      traj.steps.push_back(s);
      traj.motion.push_back(motion_from_json(rec.at("motion")));
    }
    if (traj.steps.size() != expected) {
      throw std::runtime_error("trajectory: header announces " + std::to_string(expected) +
                               " steps, found " + std::to_string(traj.steps.size()));
    }
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("trajectory: malformed record: ") + e.what());
  }
  return traj;
}

Trajectory load_trajectory(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trajectory file " + path.string());
  return read_trajectory(in);
}

ReplayResult replay_trajectory(const EnvConfig& config, const Trajectory& traj) {
  WidgetEnv env(config, 0);
  env.reset(traj.widget);
  ReplayResult result;
  for (const StepRecord& s : traj.steps) {
    if (!env.active()) break;
    result.rewards.push_back(env.step(s.action).reward.total);
  }
  const std::vector<double> stored = traj.reward_totals();
  const std::size_t n = std::min(stored.size(), result.rewards.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (std::memcmp(&stored[i], &result.rewards[i], sizeof(double)) != 0) {
      result.first_mismatch = static_cast<int>(i);
      return result;
    }
  }
  if (stored.size() != result.rewards.size()) {
    result.first_mismatch = static_cast<int>(n);
    return result;
  }
  result.match = true;
  return result;
}

}  // namespace affordlab::env
