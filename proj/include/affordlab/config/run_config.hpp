#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "affordlab/harness/experiment.hpp"

namespace affordlab::config {

// Configuration problem. what() is "<source>:<line>:<column>: <message>" when
// the location is known.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, int line = 0)
      : std::runtime_error(message), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Parses YAML configuration text on top of harness::default_plan(). Every key
// is optional; unknown keys, wrong types and out-of-range values are
// rejected. `source` names the text in diagnostics.
harness::ExperimentPlan parse_plan(const std::string& text, const std::string& source = "<config>");
harness::ExperimentPlan load_plan(const std::filesystem::path& path);

// Canonical YAML for the fully resolved plan; parse_plan(dump_plan(p))
// reproduces p. Does not include the provenance field.
std::string dump_plan(const harness::ExperimentPlan& plan);

}  // namespace affordlab::config
