#include "affordlab/learn/checkpoint.hpp"

#include <fstream>
#include <stdexcept>

#include "affordlab/common/hash.hpp"

namespace affordlab::learn {

using nlohmann::json;

namespace {

json values(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

Eigen::VectorXd values_from(const json& j, Eigen::Index expected, const char* what) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != expected) {
    throw std::runtime_error(std::string("checkpoint field '") + what + "' has wrong length");
  }
  Eigen::VectorXd v(expected);
  for (Eigen::Index i = 0; i < expected; ++i) v(i) = j[static_cast<std::size_t>(i)].get<double>();
  if (!v.allFinite()) {
    throw std::runtime_error(std::string("checkpoint field '") + what + "' is not finite");
  }
  return v;
}

json net_to_json(const Mlp& net) {
  return json{{"layers", net.layer_sizes()},
              {"activation", std::string(to_string(net.hidden_activation()))},
              {"params", values(net.params())}};
}

Mlp net_from_json(const json& j, const char* what) {
  Mlp net(j.at("layers").get<std::vector<int>>(),
          activation_from_string(j.at("activation").get<std::string>()));
  net.params() = values_from(j.at("params"), net.num_params(), what);
  return net;
}

std::uint64_t hash_vector(const Eigen::VectorXd& v, std::uint64_t state) {
  const auto n = static_cast<std::uint64_t>(v.size());
  state = fnv1a(&n, sizeof(n), state);
  return fnv1a(v.data(), sizeof(double) * static_cast<std::size_t>(v.size()), state);
}

}  // namespace

json agent_to_json(const Agent& agent) {
  const RunningNormalizer& n = agent.normalizer;
  return json{{"schema", kCheckpointSchema},
              {"version", kCheckpointVersion},
              {"action_scale", agent.action_scale},
              {"policy", net_to_json(agent.policy.mean_net)},
              {"log_std", values(agent.policy.log_std)},
              {"value", net_to_json(agent.value.net)},
              {"normalizer",
               {{"mean", values(n.mean())},
                {"var", values(n.var())},
                {"count", n.count()},
                {"clip", n.clip()}}}};
}

Agent agent_from_json(const json& j) {
  if (j.value("schema", "") != kCheckpointSchema) {
    throw std::runtime_error("not an affordlab checkpoint");
  }
  if (j.at("version").get<int>() != kCheckpointVersion) {
    throw std::runtime_error("unsupported checkpoint version " +
                             std::to_string(j.at("version").get<int>()));
  }
  Agent agent;
  agent.action_scale = j.at("action_scale").get<double>();
  agent.policy.mean_net = net_from_json(j.at("policy"), "policy.params");
  agent.policy.log_std =
      values_from(j.at("log_std"), agent.policy.mean_net.output_size(), "log_std");
  agent.value.net = net_from_json(j.at("value"), "value.params");
  if (agent.value.net.input_size() != agent.policy.mean_net.input_size() ||
      agent.value.net.output_size() != 1) {
    throw std::runtime_error("checkpoint value network shape does not match the policy");
  }
  const json& jn = j.at("normalizer");
  const Eigen::Index dim = agent.policy.mean_net.input_size();
  agent.normalizer = RunningNormalizer(static_cast<int>(dim), jn.at("clip").get<double>());
  agent.normalizer.set_state(values_from(jn.at("mean"), dim, "normalizer.mean"),
                             values_from(jn.at("var"), dim, "normalizer.var"),
                             jn.at("count").get<double>());
  return agent;
}

void save_checkpoint(const std::filesystem::path& path, const Agent& agent, const json& extra) {
  json j = agent_to_json(agent);
  j["meta"] = extra;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write checkpoint " + tmp.string());
    out << j.dump() << '\n';
    if (!out) throw std::runtime_error("failed writing checkpoint " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Agent load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("malformed checkpoint " + path.string() + ": " + e.what());
  }
  try {
    return agent_from_json(j);
  } catch (const json::exception& e) {
    throw std::runtime_error("malformed checkpoint " + path.string() + ": " + e.what());
  }
}

std::uint64_t agent_hash(const Agent& agent) {
  std::uint64_t h = kFnvOffset;
  h = hash_vector(agent.policy.mean_net.params(), h);
  h = hash_vector(agent.policy.log_std, h);
  h = hash_vector(agent.value.net.params(), h);
  h = hash_vector(agent.normalizer.mean(), h);
  h = hash_vector(agent.normalizer.var(), h);
  const double c = agent.normalizer.count();
  h = fnv1a(&c, sizeof(c), h);
  return fnv1a(&agent.action_scale, sizeof(double), h);
}

}  // namespace affordlab::learn
