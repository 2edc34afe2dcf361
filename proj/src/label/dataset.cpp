#include "affordlab/label/dataset.hpp"

#include <fstream>
#include <stdexcept>
#include <string>

#include "affordlab/label/features.hpp"

namespace affordlab::label {

using nlohmann::json;

std::optional<LabeledMotion> label_trajectory(const env::Trajectory& traj) {
  if (!traj.success || traj.steps.empty()) return std::nullopt;
  if (traj.steps.back().reward.completion != 1.0) return std::nullopt;
  if (traj.widget.kind == sim::WidgetKind::kDeceptive) return std::nullopt;
  LabeledMotion m;
  m.features = featurize(traj);
  m.label = traj.widget.mechanism == sim::Mechanism::kPress ? Label::kPress : Label::kSlide;
  m.episode_id = traj.episode_id;
  return m;
}

void write_dataset(std::ostream& out, const std::vector<LabeledMotion>& data, const json& meta) {
  const Eigen::Index dim = data.empty() ? kFeatureSize : data.front().features.size();
  out << json{{"schema", "affordlab.dataset"},
              {"version", 1},
              {"feature_size", dim},
              {"records", data.size()},
              {"meta", meta}}
             .dump()
      << '\n';
  for (const auto& m : data) {
    if (m.features.size() != dim) throw std::invalid_argument("inconsistent feature sizes");
    out << json{{"episode_id", m.episode_id},
                {"label", std::string(to_string(m.label))},
                {"features", std::vector<double>(m.features.data(),
                                                 m.features.data() + m.features.size())}}
               .dump()
        << '\n';
  }
}

void save_dataset(const std::filesystem::path& path, const std::vector<LabeledMotion>& data,
                  const json& meta) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write dataset " + path.string());
  write_dataset(out, data, meta);
  if (!out) throw std::runtime_error("failed writing dataset " + path.string());
}

std::vector<LabeledMotion> read_dataset(std::istream& in) {
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& what) {
    throw std::runtime_error("dataset line " + std::to_string(line_no) + ": " + what);
  };
  if (!std::getline(in, line)) throw std::runtime_error("dataset is empty");
  ++line_no;
  std::size_t dim = 0;
  std::size_t expected = 0;
  try {
    const json header = json::parse(line);
    if (header.value("schema", "") != "affordlab.dataset" || header.value("version", 0) != 1) {
      fail("not a version 1 affordlab dataset");
    }
    dim = header.at("feature_size").get<std::size_t>();
    expected = header.at("records").get<std::size_t>();
  } catch (const json::exception& e) {
    fail(e.what());
  }
  std::vector<LabeledMotion> data;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      const auto f = j.at("features").get<std::vector<double>>();
      if (f.size() != dim) fail("expected " + std::to_string(dim) + " features");
      LabeledMotion m;
      m.features = Eigen::Map<const Eigen::VectorXd>(f.data(), static_cast<Eigen::Index>(dim));
      m.label = label_from_string(j.at("label").get<std::string>());
      m.episode_id = j.at("episode_id").get<std::uint64_t>();
      data.push_back(std::move(m));
    } catch (const json::exception& e) {
      fail(e.what());
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
  }
  if (data.size() != expected) {
    throw std::runtime_error("dataset truncated: header announces " + std::to_string(expected) +
                             " records, found " + std::to_string(data.size()));
  }
  return data;
}

std::vector<LabeledMotion> load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset " + path.string());
  return read_dataset(in);
}

}  // namespace affordlab::label
