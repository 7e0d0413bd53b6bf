#include "escort/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "escort/belief.hpp"
#include "escort/rewards.hpp"
#include "json.hpp"

namespace escort {

ReachAvoidTask FullConfig::task() const {
  ReachAvoidTask t;
  t.goal = goal();
  t.r_d = r_d;
  t.r_o = r_o;
  t.p_o = p_o;
  t.reach_every_step = reach_every_step;
  return t;
}

SensorParams FullConfig::sensor() const { return {sensor_range, noise_var}; }

AgentParams FullConfig::pa_params() const { return {v_pa, u_max, dt}; }

AgentParams FullConfig::ea_params() const { return {v_ea, u_max, dt}; }

namespace {

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("");
    return d;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + value + "'");
  }
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const int i = std::stoi(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("");
    return i;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an integer, got '" + value + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const std::uint64_t u = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("");
    return u;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an unsigned integer, got '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError(key + ": expected true/false, got '" + value + "'");
}

using Setter = std::function<void(FullConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  auto dbl = [](double FullConfig::*field) {
    return [field](FullConfig& c, const std::string& k, const std::string& v) {
      c.*field = parse_double(k, v);
    };
  };
  auto intf = [](int FullConfig::*field) {
    return [field](FullConfig& c, const std::string& k, const std::string& v) {
      c.*field = parse_int(k, v);
    };
  };
  auto boolf = [](bool FullConfig::*field) {
    return [field](FullConfig& c, const std::string& k, const std::string& v) {
      c.*field = parse_bool(k, v);
    };
  };
  static const std::map<std::string, Setter> table = {
      {"scenario.env_size", dbl(&FullConfig::env_size)},
      {"scenario.n_objects", intf(&FullConfig::n_objects)},
      {"scenario.spawn_min", dbl(&FullConfig::spawn_min)},
      {"scenario.spawn_max", dbl(&FullConfig::spawn_max)},
      {"scenario.start_x", dbl(&FullConfig::start_x)},
      {"scenario.start_y", dbl(&FullConfig::start_y)},
      {"scenario.goal_x", dbl(&FullConfig::goal_x)},
      {"scenario.goal_y", dbl(&FullConfig::goal_y)},
      {"scenario.prior_var", dbl(&FullConfig::prior_var)},
      {"scenario.v_pa", dbl(&FullConfig::v_pa)},
      {"scenario.v_ea", dbl(&FullConfig::v_ea)},
      {"scenario.n_escorts", intf(&FullConfig::n_escorts)},
      {"scenario.variant",
       [](FullConfig& c, const std::string& k, const std::string& v) {
         parse_variant(v);  // reject unknown names early
         c.variant = v;
       }},
      {"scenario.seed",
       [](FullConfig& c, const std::string& k, const std::string& v) {
         c.seed = parse_u64(k, v);
       }},
      {"agent.dt", dbl(&FullConfig::dt)},
      {"agent.horizon", intf(&FullConfig::horizon)},
      {"agent.u_max", dbl(&FullConfig::u_max)},
      {"sensor.range", dbl(&FullConfig::sensor_range)},
      {"sensor.noise_var", dbl(&FullConfig::noise_var)},
      {"task.p_o", dbl(&FullConfig::p_o)},
      {"task.r_o", dbl(&FullConfig::r_o)},
      {"task.r_d", dbl(&FullConfig::r_d)},
      {"task.reach_every_step", boolf(&FullConfig::reach_every_step)},
      {"task.n_mc", intf(&FullConfig::n_mc)},
      {"task.n_traj", intf(&FullConfig::n_traj)},
      {"task.log_floor", dbl(&FullConfig::log_floor)},
      {"task.redraw_pa_samples", boolf(&FullConfig::redraw_pa_samples)},
      {"cem.n_samples",
       [](FullConfig& c, const std::string& k, const std::string& v) {
         c.cem.n_samples = parse_int(k, v);
       }},
      {"cem.n_elite",
       [](FullConfig& c, const std::string& k, const std::string& v) {
         c.cem.n_elite = parse_int(k, v);
       }},
      {"cem.n_inner_iters",
       [](FullConfig& c, const std::string& k, const std::string& v) {
         c.cem.n_inner_iters = parse_int(k, v);
       }},
      {"cem.var_floor",
       [](FullConfig& c, const std::string& k, const std::string& v) {
         c.cem.var_floor = parse_double(k, v);
       }},
      {"cem.var_terminate",
       [](FullConfig& c, const std::string& k, const std::string& v) {
         c.cem.var_terminate = parse_double(k, v);
       }},
      {"cem.sigma0_sq",
       [](FullConfig& c, const std::string& k, const std::string& v) {
         c.cem.sigma0_sq = parse_double(k, v);
       }},
      {"sim.collision_radius", dbl(&FullConfig::collision_radius)},
      {"sim.arrival_radius", dbl(&FullConfig::arrival_radius)},
      {"sim.max_ticks", intf(&FullConfig::max_ticks)},
      {"sim.outer_rounds", intf(&FullConfig::outer_rounds)},
      {"sim.drop_prob", dbl(&FullConfig::drop_prob)},
      {"sim.execute_mean", boolf(&FullConfig::execute_mean)},
      {"sim.scheduler",
       [](FullConfig& c, const std::string& k, const std::string& v) {
         if (v != "sync" && v != "async") {
           throw ConfigError(k + ": expected sync or async, got '" + v + "'");
         }
         c.scheduler = v;
       }},
  };
  return table;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void set_config_value(FullConfig& cfg, const std::string& key,
                      const std::string& value) {
  const auto& table = setters();
  auto it = table.find(key);
  if (it == table.end()) throw ConfigError("unknown config key: " + key);
  it->second(cfg, key, value);
}

FullConfig parse_config(const std::string& text) {
  FullConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) {
      throw ConfigError("line " + std::to_string(lineno) + ": key outside any section");
    }
    try {
      set_config_value(cfg, section + "." + key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

void validate(const FullConfig& c) {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  require(c.env_size > 0, "scenario.env_size: must be > 0");
  require(c.n_objects >= 0, "scenario.n_objects: must be >= 0");
  require(c.spawn_min <= c.spawn_max, "scenario.spawn_min/spawn_max: spawn box is empty");
  require(c.spawn_min >= 0 && c.spawn_max <= c.env_size,
          "scenario.spawn_min/spawn_max: spawn box must lie inside the environment");
  require(c.prior_var > 0, "scenario.prior_var: must be > 0");
  require(c.v_pa > 0, "scenario.v_pa: must be > 0");
  require(c.v_ea > 0, "scenario.v_ea: must be > 0");
  require(c.n_escorts >= 0 && c.n_escorts <= 8, "scenario.n_escorts: must be in [0, 8]");
  const bool blind = c.variant == "blind";
  require(blind == (c.n_escorts == 0),
          "scenario.variant/n_escorts: n_escorts must be 0 exactly when variant is blind");
  require(c.dt > 0, "agent.dt: must be > 0");
  require(c.horizon >= 1, "agent.horizon: must be >= 1");
  require(c.u_max > 0, "agent.u_max: must be > 0");
  require(c.sensor_range > 0, "sensor.range: must be > 0");
  require(c.noise_var > 0, "sensor.noise_var: must be > 0");
  require(c.p_o > 0 && c.p_o <= 1, "task.p_o: must be in (0, 1]");
  require(c.r_o > 0, "task.r_o: must be > 0");
  require(c.r_d > 0, "task.r_d: must be > 0");
  require(c.n_mc >= 1, "task.n_mc: must be >= 1");
  require(c.n_traj >= 1, "task.n_traj: must be >= 1");
  require(c.cem.n_samples >= 1, "cem.n_samples: must be >= 1");
  require(c.cem.n_elite >= 1 && c.cem.n_elite <= c.cem.n_samples,
          "cem.n_elite/cem.n_samples: need 1 <= n_elite <= n_samples");
  require(c.cem.n_inner_iters >= 0, "cem.n_inner_iters: must be >= 0");
  require(c.cem.var_floor > 0, "cem.var_floor: must be > 0");
  require(c.cem.var_terminate >= c.cem.var_floor,
          "cem.var_terminate/cem.var_floor: need var_terminate >= var_floor");
  require(c.cem.sigma0_sq > 0, "cem.sigma0_sq: must be > 0");
  require(c.collision_radius > 0, "sim.collision_radius: must be > 0");
  require(c.arrival_radius > 0, "sim.arrival_radius: must be > 0");
  require(c.max_ticks >= 1, "sim.max_ticks: must be >= 1");
  require(c.outer_rounds >= 0, "sim.outer_rounds: must be >= 0");
  require(c.drop_prob >= 0 && c.drop_prob <= 1, "sim.drop_prob: must be in [0, 1]");
}

std::string config_to_json(const FullConfig& c) {
  nlohmann::json j;
  j["scenario"] = {{"env_size", c.env_size},   {"n_objects", c.n_objects},
                   {"spawn_min", c.spawn_min}, {"spawn_max", c.spawn_max},
                   {"start_x", c.start_x},     {"start_y", c.start_y},
                   {"goal_x", c.goal_x},       {"goal_y", c.goal_y},
                   {"prior_var", c.prior_var}, {"v_pa", c.v_pa},
                   {"v_ea", c.v_ea},           {"n_escorts", c.n_escorts},
                   {"variant", c.variant},     {"seed", c.seed}};
  j["agent"] = {{"dt", c.dt}, {"horizon", c.horizon}, {"u_max", c.u_max}};
  j["sensor"] = {{"range", c.sensor_range}, {"noise_var", c.noise_var}};
  j["task"] = {{"p_o", c.p_o},
               {"r_o", c.r_o},
               {"r_d", c.r_d},
               {"reach_every_step", c.reach_every_step},
               {"n_mc", c.n_mc},
               {"n_traj", c.n_traj},
               {"log_floor", c.log_floor},
               {"redraw_pa_samples", c.redraw_pa_samples}};
  j["cem"] = {{"n_samples", c.cem.n_samples},
              {"n_elite", c.cem.n_elite},
              {"n_inner_iters", c.cem.n_inner_iters},
              {"var_floor", c.cem.var_floor},
              {"var_terminate", c.cem.var_terminate},
              {"sigma0_sq", c.cem.sigma0_sq}};
  j["sim"] = {{"collision_radius", c.collision_radius},
              {"arrival_radius", c.arrival_radius},
              {"max_ticks", c.max_ticks},
              {"outer_rounds", c.outer_rounds},
              {"drop_prob", c.drop_prob},
              {"execute_mean", c.execute_mean},
              {"scheduler", c.scheduler}};
  return j.dump();
}

FullConfig config_from_json(const std::string& json_text) {
  const auto j = nlohmann::json::parse(json_text);
  FullConfig c;
  const auto& sc = j.at("scenario");
  c.env_size = sc.at("env_size");
  c.n_objects = sc.at("n_objects");
  c.spawn_min = sc.at("spawn_min");
  c.spawn_max = sc.at("spawn_max");
  c.start_x = sc.at("start_x");
  c.start_y = sc.at("start_y");
  c.goal_x = sc.at("goal_x");
  c.goal_y = sc.at("goal_y");
  c.prior_var = sc.at("prior_var");
  c.v_pa = sc.at("v_pa");
  c.v_ea = sc.at("v_ea");
  c.n_escorts = sc.at("n_escorts");
  c.variant = sc.at("variant");
  c.seed = sc.at("seed");
  const auto& ag = j.at("agent");
  c.dt = ag.at("dt");
  c.horizon = ag.at("horizon");
  c.u_max = ag.at("u_max");
  const auto& se = j.at("sensor");
  c.sensor_range = se.at("range");
  c.noise_var = se.at("noise_var");
  const auto& tk = j.at("task");
  c.p_o = tk.at("p_o");
  c.r_o = tk.at("r_o");
  c.r_d = tk.at("r_d");
  c.reach_every_step = tk.at("reach_every_step");
  c.n_mc = tk.at("n_mc");
  c.n_traj = tk.at("n_traj");
  c.log_floor = tk.at("log_floor");
  c.redraw_pa_samples = tk.at("redraw_pa_samples");
  const auto& ce = j.at("cem");
  c.cem.n_samples = ce.at("n_samples");
  c.cem.n_elite = ce.at("n_elite");
  c.cem.n_inner_iters = ce.at("n_inner_iters");
  c.cem.var_floor = ce.at("var_floor");
  c.cem.var_terminate = ce.at("var_terminate");
  c.cem.sigma0_sq = ce.at("sigma0_sq");
  const auto& si = j.at("sim");
  c.collision_radius = si.at("collision_radius");
  c.arrival_radius = si.at("arrival_radius");
  c.max_ticks = si.at("max_ticks");
  c.outer_rounds = si.at("outer_rounds");
  c.drop_prob = si.at("drop_prob");
  c.execute_mean = si.at("execute_mean");
  c.scheduler = si.at("scheduler");
  return c;
}

}  // namespace escort
