#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "affordlab/learn/agent.hpp"

namespace affordlab::learn {

inline constexpr const char* kCheckpointSchema = "affordlab.checkpoint";
inline constexpr int kCheckpointVersion = 1;

// Structured-text dump of an agent: architecture descriptors, flat parameter
// vectors, log_std and observation normalizer statistics. Doubles are written
// with round-trip precision, so load(save(a)) is bit-identical to a.
nlohmann::json agent_to_json(const Agent& agent);
Agent agent_from_json(const nlohmann::json& j);

// `extra` is stored verbatim under "meta" (e.g. provenance, update index)
void save_checkpoint(const std::filesystem::path& path, const Agent& agent,
                     const nlohmann::json& extra = nlohmann::json::object());
Agent load_checkpoint(const std::filesystem::path& path);

// Hash over every parameter bit and the normalizer state.
std::uint64_t agent_hash(const Agent& agent);

}  // namespace affordlab::learn
