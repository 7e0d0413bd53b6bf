#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "escort/deccem.hpp"
#include "escort/task.hpp"

namespace escort {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Full run configuration. Defaults reproduce the reference simulation
/// setup: 100x100 m environment, 20 objects in [20,80]^2, prior variance
/// 25 m^2, PA at 2 m/s and escorts at 4 m/s.
struct FullConfig {
  // scenario
  double env_size = 100.0;
  int n_objects = 20;
  double spawn_min = 20.0;
  double spawn_max = 80.0;
  double start_x = 10.0;
  double start_y = 50.0;
  double goal_x = 90.0;
  double goal_y = 50.0;
  double prior_var = 25.0;  // initial per-axis belief variance [m^2]
  double v_pa = 2.0;
  double v_ea = 4.0;
  int n_escorts = 2;
  std::string variant = "se";  // blind | mi-ucb | si | se
  std::uint64_t seed = 0;

  // agent
  double dt = 1.0;
  int horizon = 10;
  double u_max = M_PI / 2.0;

  // sensor
  double sensor_range = 10.0;
  double noise_var = 1.0;

  // task
  double p_o = 0.9;
  double r_o = 4.0;
  double r_d = 10.0;
  bool reach_every_step = true;
  int n_mc = 30;
  int n_traj = 10;
  double log_floor = -1e6;
  bool redraw_pa_samples = false;

  // cem
  CemConfig cem;

  // sim
  double collision_radius = 2.0;
  double arrival_radius = 5.0;
  int max_ticks = 120;
  int outer_rounds = 3;
  double drop_prob = 0.0;
  bool execute_mean = true;
  std::string scheduler = "sync";  // sync | async

  ReachAvoidTask task() const;
  SensorParams sensor() const;
  AgentParams pa_params() const;
  AgentParams ea_params() const;
  Eigen::Vector2d start() const { return {start_x, start_y}; }
  Eigen::Vector2d goal() const { return {goal_x, goal_y}; }
};

/// Parses sectioned key/value text ("[section]" headers, "key = value"
/// lines, '#' or ';' comments) on top of defaults. Unknown sections or keys
/// are rejected with their line number. Does not cross-validate.
FullConfig parse_config(const std::string& text);

/// Applies one "section.key" = value override.
void set_config_value(FullConfig& cfg, const std::string& key,
                      const std::string& value);

/// Cross-field validation; throws ConfigError naming field and constraint.
void validate(const FullConfig& cfg);

std::string config_to_json(const FullConfig& cfg);
FullConfig config_from_json(const std::string& json_text);

}  // namespace escort
