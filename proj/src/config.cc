// Copyright 2026 The slipgain Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "slipgain/config.h"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace slipgain {

namespace {

// One (section, key) binding: read from text, write canonical text.
struct Field {
  std::string section;
  std::string key;
  std::function<void(const std::string&)> read;
  std::function<std::string()> write;
};

std::string Format(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

template <typename T>
Field Bind(const std::string& section, const std::string& key, T* target) {
  Field f{section, key, nullptr, nullptr};
  f.read = [target, section, key](const std::string& text) {
    std::istringstream is(text);
    T value{};
    if constexpr (std::is_same_v<T, bool>) {
      is >> std::boolalpha >> value;
    } else {
      is >> value;
    }
    if (!is || !(is >> std::ws).eof()) {
      throw std::invalid_argument("config: bad value for " + section + "." +
                                  key + ": '" + text + "'");
    }
    *target = value;
  };
  f.write = [target]() {
    if constexpr (std::is_same_v<T, double>) {
      return Format(*target);
    } else if constexpr (std::is_same_v<T, bool>) {
      return std::string(*target ? "true" : "false");
    } else {
      return std::to_string(*target);
    }
  };
  return f;
}

Field BindHidden(std::vector<int>* target) {
  Field f{"sac", "hidden_sizes", nullptr, nullptr};
  f.read = [target](const std::string& text) {
    std::vector<int> sizes;
    std::istringstream is(text);
    std::string part;
    while (std::getline(is, part, ',')) sizes.push_back(std::stoi(part));
    if (sizes.empty()) throw std::invalid_argument("config: empty hidden_sizes");
    *target = sizes;
  };
  f.write = [target]() {
    std::string out;
    for (std::size_t i = 0; i < target->size(); ++i) {
      if (i) out += ',';
      out += std::to_string((*target)[i]);
    }
    return out;
  };
  return f;
}

std::vector<Field> Fields(Config& c) {
  return {
      Bind("robot", "wheel_radius", &c.robot.wheel_radius),
      Bind("robot", "wheel_base", &c.robot.wheel_base),
      Bind("robot", "control_period", &c.robot.control_period),
      Bind("robot", "gravity", &c.robot.gravity),
      Bind("robot", "traction_factor", &c.robot.traction_factor),
      Bind("robot", "v_max", &c.robot.v_max),
      Bind("robot", "omega_max", &c.robot.omega_max),
      Bind("controller", "n_previews", &c.controller.n_previews),
      Bind("controller", "p1", &c.controller.p1),
      Bind("controller", "preview_dt", &c.controller.preview_dt),
      Bind("controller", "delta_max", &c.controller.delta_max),
      Bind("controller", "v_epsilon", &c.controller.v_epsilon),
      Bind("controller", "predictive", &c.controller.predictive),
      Bind("reward", "r_dist", &c.reward.r_dist),
      Bind("reward", "r_ang", &c.reward.r_ang),
      Bind("reward", "r_speed", &c.reward.r_speed),
      BindHidden(&c.sac.hidden_sizes),
      Bind("sac", "learning_rate", &c.sac.learning_rate),
      Bind("sac", "gamma", &c.sac.gamma),
      Bind("sac", "tau", &c.sac.tau),
      Bind("sac", "batch_size", &c.sac.batch_size),
      Bind("sac", "replay_capacity", &c.sac.replay_capacity),
      Bind("sac", "auto_entropy", &c.sac.auto_entropy),
      Bind("sac", "initial_alpha", &c.sac.initial_alpha),
      Bind("sac", "target_entropy", &c.sac.target_entropy),
      Bind("sac", "action_low", &c.sac.action_low),
      Bind("sac", "action_high", &c.sac.action_high),
      Bind("sac", "update_every", &c.sac.update_every),
      Bind("sac", "warmup_steps", &c.sac.warmup_steps),
      Bind("sac", "train_steps", &c.train.steps),
      Bind("sac", "eval_every", &c.train.eval_every),
      Bind("sac", "eval_fixtures", &c.train.eval_fixtures),
      Bind("sac", "reward_floor", &c.train.reward_floor),
      Bind("world", "low_fraction", &c.world.low_fraction),
      Bind("world", "mu_high", &c.world.mu_high),
      Bind("world", "mu_low", &c.world.mu_low),
      Bind("world", "cell_size", &c.world.cell_size),
      Bind("world", "margin", &c.world.margin),
      Bind("episode", "goal_tolerance", &c.episode.goal_tolerance),
      Bind("episode", "max_steps", &c.episode.max_steps),
      Bind("episode", "ds", &c.episode.ds),
      Bind("episode", "v_ref", &c.episode.v_ref),
  };
}

}  // namespace

void EpisodeConfig::Validate() const {
  if (!(goal_tolerance > 0.0) || max_steps < 1 || !(ds > 0.0) ||
      !(v_ref > 0.0)) {
    throw std::invalid_argument("invalid episode config");
  }
}

void Config::Validate() const {
  robot.Validate();
  controller.Validate();
  sac.Validate();
  episode.Validate();
  if (reward.r_dist > 0.0 || reward.r_ang > 0.0 || reward.r_speed > 0.0) {
    throw std::invalid_argument("reward coefficients must be <= 0");
  }
  if (!(world.low_fraction >= 0.0 && world.low_fraction < 1.0)) {
    throw std::invalid_argument("world low_fraction must be in [0, 1)");
  }
  if (train.steps < 0 || train.eval_every < 1 || train.eval_fixtures < 1 ||
      !(train.reward_floor >= 0.0)) {
    throw std::invalid_argument("invalid training schedule");
  }
}

Config ParseConfig(const std::string& text) {
  boost::property_tree::ptree tree;
  std::istringstream is(text);
  try {
    boost::property_tree::read_ini(is, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  Config config;
  std::map<std::string, Field> by_name;
  for (Field& f : Fields(config)) by_name.emplace(f.section + "." + f.key, f);
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw std::invalid_argument("config: key outside a section: " + section);
    }
    for (const auto& [key, value] : body) {
      auto it = by_name.find(section + "." + key);
      if (it == by_name.end()) {
        throw std::invalid_argument("config: unknown key " + section + "." + key);
      }
      it->second.read(value.data());
    }
  }
  config.Validate();
  return config;
}

Config LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseConfig(buffer.str());
}

std::string CanonicalConfig(const Config& config) {
  Config copy = config;
  std::string out;
  for (const Field& f : Fields(copy)) {
    out += f.section + "." + f.key + "=" + f.write() + "\n";
  }
  return out;
}

std::uint64_t ConfigHash(const Config& config) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : CanonicalConfig(config)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace slipgain
