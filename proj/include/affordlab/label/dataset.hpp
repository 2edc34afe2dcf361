#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include <json.hpp>

#include "affordlab/env/trajectory.hpp"
#include "affordlab/label/classifier.hpp"

namespace affordlab::label {

// Label for a trajectory, taken from the generating widget's mechanism.
// Returns nullopt unless the episode earned its completion reward; deceptive
// widgets never produce training labels.
std::optional<LabeledMotion> label_trajectory(const env::Trajectory& traj);

// Line-delimited JSON: a header record (schema, feature size, `meta`) then one
// record per sample with features, label and source episode id.
void write_dataset(std::ostream& out, const std::vector<LabeledMotion>& data,
                   const nlohmann::json& meta = nlohmann::json::object());
void save_dataset(const std::filesystem::path& path, const std::vector<LabeledMotion>& data,
                  const nlohmann::json& meta = nlohmann::json::object());
// throws std::runtime_error naming the offending line
std::vector<LabeledMotion> read_dataset(std::istream& in);
std::vector<LabeledMotion> load_dataset(const std::filesystem::path& path);

}  // namespace affordlab::label
