#pragma once

#include <json.hpp>

#include "affordlab/env/mdp.hpp"
#include "affordlab/env/trajectory.hpp"

namespace affordlab::env {

nlohmann::json to_json(const sim::WidgetSpec& spec);
sim::WidgetSpec widget_from_json(const nlohmann::json& j);

nlohmann::json to_json(const MotionSample& sample);
MotionSample motion_from_json(const nlohmann::json& j);

template <typename Derived>
nlohmann::json vector_to_json(const Eigen::MatrixBase<Derived>& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

// throws std::runtime_error when the array length differs from `Derived`'s
template <typename Derived>
void vector_from_json(const nlohmann::json& j, Eigen::MatrixBase<Derived>& v) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != v.size()) {
    throw std::runtime_error("expected numeric array of length " + std::to_string(v.size()));
  }
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = j[static_cast<std::size_t>(i)].get<double>();
}

}  // namespace affordlab::env
