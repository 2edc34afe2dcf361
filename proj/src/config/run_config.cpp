#include "affordlab/config/run_config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace affordlab::config {

using harness::ExperimentPlan;
using harness::PhaseSettings;

namespace {

std::string located(const std::string& source, const YAML::Mark& mark, const std::string& msg) {
  if (mark.is_null()) return source + ": " + msg;
  return source + ":" + std::to_string(mark.line + 1) + ":" + std::to_string(mark.column + 1) +
         ": " + msg;
}

// Reads one mapping node, remembering which keys were consumed so leftovers
// can be reported as unknown.
class Section {
 public:
  Section(const YAML::Node& node, std::string path, const std::string& source)
      : node_(node), path_(std::move(path)), source_(source) {
    if (node_ && !node_.IsNull() && !node_.IsMap()) {
      fail(node_, "section '" + path_ + "' must be a mapping");
    }
  }

  ~Section() noexcept(false) {
    if (std::uncaught_exceptions() == 0) finish();
  }

  template <typename T>
  void get(const char* key, T& out) {
    const YAML::Node n = take(key);
    if (!n) return;
    out = convert<T>(n, key);
  }

  template <typename Derived>
  void get_vector(const char* key, Eigen::MatrixBase<Derived>& out) {
    const YAML::Node n = take(key);
    if (!n) return;
    if (!n.IsSequence() || static_cast<Eigen::Index>(n.size()) != out.size()) {
      fail(n, "'" + name(key) + "' must be a list of " + std::to_string(out.size()) + " numbers");
    }
    for (std::size_t i = 0; i < n.size(); ++i) {
      out(static_cast<Eigen::Index>(i)) = convert<double>(n[i], key);
    }
  }

  // node of a nested key, or an undefined node
  YAML::Node take(const char* key) {
    if (!node_ || !node_.IsMap()) return YAML::Node(YAML::NodeType::Undefined);
    seen_.insert(key);
    const YAML::Node n = node_[key];
    return n ? n : YAML::Node(YAML::NodeType::Undefined);
  }

  std::string name(const char* key) const { return path_.empty() ? key : path_ + "." + key; }
  const std::string& source() const { return source_; }

  [[noreturn]] void fail(const YAML::Node& n, const std::string& msg) const {
    throw ConfigError(located(source_, n.Mark(), msg), n.Mark().is_null() ? 0 : n.Mark().line + 1);
  }

  template <typename T>
  T convert(const YAML::Node& n, const char* key) const {
    if (!n.IsScalar()) fail(n, "'" + name(key) + "' must be a scalar");
    try {
      if constexpr (std::is_same_v<T, bool>) {
        return n.as<bool>();
      } else if constexpr (std::is_integral_v<T>) {
        // reject 1.5 or 1e3 for integer fields
        const std::string& s = n.Scalar();
        if (s.find_first_of(".eE") != std::string::npos) throw YAML::BadConversion(n.Mark());
        return n.as<T>();
      } else {
        return n.as<T>();
      }
    } catch (const YAML::BadConversion&) {
      const char* what = std::is_same_v<T, bool>       ? "true or false"
                         : std::is_integral_v<T>       ? "an integer"
                         : std::is_floating_point_v<T> ? "a number"
                                                       : "a string";
      fail(n, "'" + name(key) + "' must be " + what + ", got '" + n.Scalar() + "'");
    }
  }

  void finish() {
    if (finished_) return;
    finished_ = true;
    if (!node_ || !node_.IsMap()) return;
    for (const auto& kv : node_) {
      const std::string key = kv.first.as<std::string>();
      if (!seen_.count(key)) fail(kv.first, "unknown key '" + name(key.c_str()) + "'");
    }
  }

 private:
  YAML::Node node_;
  std::string path_;
  const std::string& source_;
  std::set<std::string> seen_;
  bool finished_ = false;
};

sim::WidgetKind kind_from(Section& s, const YAML::Node& n, const char* key) {
  const auto text = s.convert<std::string>(n, key);
  try {
    return sim::widget_kind_from_string(text);
  } catch (const std::exception&) {
    s.fail(n, "'" + s.name(key) + "' must be button, slider or deceptive, got '" + text + "'");
  }
}

void read_arm(Section&& s, sim::ArmConfig& a) {
  s.get("upper_arm_len", a.upper_arm_len);
  s.get("forearm_len", a.forearm_len);
  s.get("finger_len", a.finger_len);
  s.get("fingertip_radius", a.fingertip_radius);
  s.get_vector("shoulder_pos", a.shoulder_pos);
  if (YAML::Node n = s.take("joint_limits")) {
    if (!n.IsSequence() || n.size() != sim::kNumJoints) {
      s.fail(n, "'arm.joint_limits' must be a list of 7 [lower, upper] pairs");
    }
    for (std::size_t j = 0; j < n.size(); ++j) {
      if (!n[j].IsSequence() || n[j].size() != 2) {
        s.fail(n[j], "'arm.joint_limits' entries must be [lower, upper]");
      }
      a.joint_limits[j].lower = s.convert<double>(n[j][0], "joint_limits");
      a.joint_limits[j].upper = s.convert<double>(n[j][1], "joint_limits");
    }
  }
  s.get("max_force", a.max_force);
  s.get_vector("motor_gear", a.motor_gear);
  s.get_vector("joint_damping", a.joint_damping);
  s.get_vector("joint_inertia", a.joint_inertia);
  s.get_vector("rest_angles", a.rest_angles);
}

void read_mix(Section& parent, const char* key, learn::WidgetMix& mix) {
  YAML::Node n = parent.take(key);
  if (!n) return;
  if (!n.IsMap() || n.size() == 0) parent.fail(n, "'" + parent.name(key) + "' must be a mapping kind: weight");
  mix.weights.clear();
  for (const auto& kv : n) {
    const sim::WidgetKind kind = kind_from(parent, kv.first, key);
    mix.weights.emplace_back(kind, parent.convert<double>(kv.second, key));
  }
}

void read_phase(Section&& s, PhaseSettings& p, bool adaptation, int* final_eval) {
  s.get("updates", p.updates);
  s.get("num_envs", p.num_envs);
  s.get("eval_episodes", p.eval_episodes);
  s.get("checkpoint_every", p.checkpoint_every);
  if (!adaptation) {
    read_mix(s, "mix", p.mix);
    s.get("final_eval_episodes", *final_eval);
    return;
  }
  if (YAML::Node n = s.take("widget")) {
    const sim::WidgetKind kind = kind_from(s, n, "widget");
    p.mix.weights = {{kind, 1.0}};
    p.eval_kinds = {kind};
    p.probe_widget = kind;
  }
  s.get("probe_every", p.probe_every);
  s.get("probe_rollouts", p.probe_rollouts);
  s.get("min_std", p.min_std);
  s.get("update_normalizer", p.update_normalizer);
}

std::string num(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  std::string s(buf, r.ptr);
  // keep it a float when read back
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

template <typename Derived>
std::string list(const Eigen::MatrixBase<Derived>& v) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v(i));
  return s + "]";
}

}  // namespace

ExperimentPlan parse_plan(const std::string& text, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(located(source, e.mark, e.msg), e.mark.line + 1);
  }
  std::uint64_t seed = 1;
  if (root.IsMap() && root["seed"]) {
    Section probe(YAML::Node(), "", source);
    seed = probe.convert<std::uint64_t>(root["seed"], "seed");
  }
  ExperimentPlan plan = harness::default_plan(seed);
  if (root.IsNull()) return plan;
  {
    Section top(root, "", source);
    top.take("seed");
    top.get("threads", plan.threads);
    read_arm(Section(top.take("arm"), "arm", source), plan.env.arm);
    {
      Section s(top.take("contact"), "contact", source);
      s.get("stiffness", plan.env.contact.stiffness);
      s.get("damping", plan.env.contact.damping);
      s.get("table_stiffness", plan.env.contact.table_stiffness);
      s.get("table_damping", plan.env.contact.table_damping);
      s.get("max_substep", plan.env.contact.max_substep);
    }
    {
      Section s(top.take("reward"), "reward", source);
      s.get("distance_factor", plan.env.reward.distance_factor);
      s.get("movement_factor", plan.env.reward.movement_factor);
    }
    {
      Section s(top.take("placement"), "placement", source);
      s.get("center_x", plan.env.placement.center_x);
      s.get("center_y", plan.env.placement.center_y);
      s.get("side", plan.env.placement.side);
    }
    {
      Section s(top.take("widgets"), "widgets", source);
      auto& w = plan.env.widgets;
      s.get("button_spring_k", w.button_spring_k);
      s.get("button_travel", w.button_travel);
      s.get("button_damping", w.button_damping);
      s.get("deceptive_spring_k", w.deceptive_spring_k);
      s.get("deceptive_travel", w.deceptive_travel);
      s.get("deceptive_damping", w.deceptive_damping);
      s.get("slider_damping", w.slider_damping);
      s.get("handle_mass", w.handle_mass);
      s.get("press_goal", w.press_goal);
      s.get("slide_goal", w.slide_goal);
    }
    {
      Section s(top.take("env"), "env", source);
      s.get("horizon", plan.env.horizon);
      s.get("dt", plan.env.dt);
      s.get("discount", plan.env.discount);
    }
    {
      Section s(top.take("agent"), "agent", source);
      if (YAML::Node n = s.take("hidden")) {
        if (!n.IsSequence() || n.size() == 0) s.fail(n, "'agent.hidden' must be a list of layer sizes");
        plan.agent.hidden.clear();
        for (const auto& h : n) plan.agent.hidden.push_back(s.convert<int>(h, "hidden"));
      }
      if (YAML::Node n = s.take("activation")) {
        const auto name = s.convert<std::string>(n, "activation");
        try {
          plan.agent.activation = learn::activation_from_string(name);
        } catch (const std::exception&) {
          s.fail(n, "'agent.activation' must be tanh or relu, got '" + name + "'");
        }
      }
      s.get("initial_std", plan.agent.initial_std);
      s.get("action_scale", plan.agent.action_scale);
    }
    {
      Section s(top.take("ppo"), "ppo", source);
      auto& p = plan.ppo;
      s.get("clip_epsilon", p.clip_epsilon);
      s.get("gae_lambda", p.gae_lambda);
      s.get("learning_rate", p.learning_rate);
      s.get("epochs_per_update", p.epochs_per_update);
      s.get("minibatch_size", p.minibatch_size);
      s.get("steps_per_update", p.steps_per_update);
      s.get("value_loss_coef", p.value_loss_coef);
      s.get("entropy_coef", p.entropy_coef);
      s.get("max_grad_norm", p.max_grad_norm);
    }
    read_phase(Section(top.take("phase1"), "phase1", source), plan.phase1, false,
               &plan.final_eval_episodes);
    {
      Section s(top.take("dataset"), "dataset", source);
      s.get("per_class", plan.dataset.per_class);
      s.get("max_attempts_per_class", plan.dataset.max_attempts_per_class);
    }
    {
      Section s(top.take("classifier"), "classifier", source);
      auto& c = plan.classifier;
      s.get("hidden", c.hidden);
      s.get("learning_rate", c.learning_rate);
      s.get("minibatch", c.minibatch);
      s.get("max_epochs", c.max_epochs);
      s.get("patience", c.patience);
      s.get("train_fraction", c.train_fraction);
      s.get("val_fraction", c.val_fraction);
    }
    read_phase(Section(top.take("phase2"), "phase2", source), plan.phase2, true, nullptr);
  }
  plan.ppo.discount = plan.env.discount;
  try {
    plan.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(source + ": invalid configuration: " + e.what());
  }
  return plan;
}

ExperimentPlan load_plan(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_plan(buf.str(), path.string());
}

std::string dump_plan(const ExperimentPlan& plan) {
  std::ostringstream o;
  const auto& a = plan.env.arm;
  o << "seed: " << plan.seed << '\n' << "threads: " << plan.threads << '\n';
  o << "arm:\n"
    << "  upper_arm_len: " << num(a.upper_arm_len) << '\n'
    << "  forearm_len: " << num(a.forearm_len) << '\n'
    << "  finger_len: " << num(a.finger_len) << '\n'
    << "  fingertip_radius: " << num(a.fingertip_radius) << '\n'
    << "  shoulder_pos: " << list(a.shoulder_pos) << '\n'
    << "  joint_limits: [";
  for (int j = 0; j < sim::kNumJoints; ++j) {
    o << (j ? ", " : "") << '[' << num(a.joint_limits[j].lower) << ", "
      << num(a.joint_limits[j].upper) << ']';
  }
  o << "]\n"
    << "  max_force: " << num(a.max_force) << '\n'
    << "  motor_gear: " << list(a.motor_gear) << '\n'
    << "  joint_damping: " << list(a.joint_damping) << '\n'
    << "  joint_inertia: " << list(a.joint_inertia) << '\n'
    << "  rest_angles: " << list(a.rest_angles) << '\n';
  const auto& c = plan.env.contact;
  o << "contact:\n"
    << "  stiffness: " << num(c.stiffness) << '\n'
    << "  damping: " << num(c.damping) << '\n'
    << "  table_stiffness: " << num(c.table_stiffness) << '\n'
    << "  table_damping: " << num(c.table_damping) << '\n'
    << "  max_substep: " << num(c.max_substep) << '\n';
  o << "reward:\n"
    << "  distance_factor: " << num(plan.env.reward.distance_factor) << '\n'
    << "  movement_factor: " << num(plan.env.reward.movement_factor) << '\n';
  o << "placement:\n"
    << "  center_x: " << num(plan.env.placement.center_x) << '\n'
    << "  center_y: " << num(plan.env.placement.center_y) << '\n'
    << "  side: " << num(plan.env.placement.side) << '\n';
  const auto& w = plan.env.widgets;
  o << "widgets:\n"
    << "  button_spring_k: " << num(w.button_spring_k) << '\n'
    << "  button_travel: " << num(w.button_travel) << '\n'
    << "  button_damping: " << num(w.button_damping) << '\n'
    << "  deceptive_spring_k: " << num(w.deceptive_spring_k) << '\n'
    << "  deceptive_travel: " << num(w.deceptive_travel) << '\n'
    << "  deceptive_damping: " << num(w.deceptive_damping) << '\n'
    << "  slider_damping: " << num(w.slider_damping) << '\n'
    << "  handle_mass: " << num(w.handle_mass) << '\n'
    << "  press_goal: " << num(w.press_goal) << '\n'
    << "  slide_goal: " << num(w.slide_goal) << '\n';
  o << "env:\n"
    << "  horizon: " << plan.env.horizon << '\n'
    << "  dt: " << num(plan.env.dt) << '\n'
    << "  discount: " << num(plan.env.discount) << '\n';
  o << "agent:\n  hidden: [";
  for (std::size_t i = 0; i < plan.agent.hidden.size(); ++i) {
    o << (i ? ", " : "") << plan.agent.hidden[i];
  }
  o << "]\n"
    << "  activation: " << learn::to_string(plan.agent.activation) << '\n'
    << "  initial_std: " << num(plan.agent.initial_std) << '\n'
    << "  action_scale: " << num(plan.agent.action_scale) << '\n';
  const auto& p = plan.ppo;
  o << "ppo:\n"
    << "  clip_epsilon: " << num(p.clip_epsilon) << '\n'
    << "  gae_lambda: " << num(p.gae_lambda) << '\n'
    << "  learning_rate: " << num(p.learning_rate) << '\n'
    << "  epochs_per_update: " << p.epochs_per_update << '\n'
    << "  minibatch_size: " << p.minibatch_size << '\n'
    << "  steps_per_update: " << p.steps_per_update << '\n'
    << "  value_loss_coef: " << num(p.value_loss_coef) << '\n'
    << "  entropy_coef: " << num(p.entropy_coef) << '\n'
    << "  max_grad_norm: " << num(p.max_grad_norm) << '\n';
  const auto& p1 = plan.phase1;
  o << "phase1:\n"
    << "  updates: " << p1.updates << '\n'
    << "  num_envs: " << p1.num_envs << '\n'
    << "  mix: {";
  for (std::size_t i = 0; i < p1.mix.weights.size(); ++i) {
    o << (i ? ", " : "") << sim::to_string(p1.mix.weights[i].first) << ": "
      << num(p1.mix.weights[i].second);
  }
  o << "}\n"
    << "  eval_episodes: " << p1.eval_episodes << '\n'
    << "  checkpoint_every: " << p1.checkpoint_every << '\n'
    << "  final_eval_episodes: " << plan.final_eval_episodes << '\n';
  o << "dataset:\n"
    << "  per_class: " << plan.dataset.per_class << '\n'
    << "  max_attempts_per_class: " << plan.dataset.max_attempts_per_class << '\n';
  const auto& k = plan.classifier;
  o << "classifier:\n"
    << "  hidden: " << k.hidden << '\n'
    << "  learning_rate: " << num(k.learning_rate) << '\n'
    << "  minibatch: " << k.minibatch << '\n'
    << "  max_epochs: " << k.max_epochs << '\n'
    << "  patience: " << k.patience << '\n'
    << "  train_fraction: " << num(k.train_fraction) << '\n'
    << "  val_fraction: " << num(k.val_fraction) << '\n';
  const auto& p2 = plan.phase2;
  o << "phase2:\n"
    << "  updates: " << p2.updates << '\n'
    << "  num_envs: " << p2.num_envs << '\n'
    << "  widget: " << sim::to_string(p2.probe_widget) << '\n'
    << "  eval_episodes: " << p2.eval_episodes << '\n'
    << "  checkpoint_every: " << p2.checkpoint_every << '\n'
    << "  probe_every: " << p2.probe_every << '\n'
    << "  probe_rollouts: " << p2.probe_rollouts << '\n'
    << "  min_std: " << num(p2.min_std) << '\n'
    << "  update_normalizer: " << (p2.update_normalizer ? "true" : "false") << '\n';
  return o.str();
}

}  // namespace affordlab::config
