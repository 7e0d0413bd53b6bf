#pragma once

#include <cmath>
#include <vector>

namespace escort {

/// Planar pose; heading is kept in (-pi, pi].
struct RobotState {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
};

struct AgentParams {
  double v = 2.0;            // fixed linear speed [m/s]
  double u_max = M_PI / 2.0; // angular-rate bound [rad/s]
  double dt = 1.0;           // integration step [s]
};

/// Angular rate per timestep [rad/s].
using ControlSequence = std::vector<double>;

/// T+1 states, index 0 is the initial state.
using Trajectory = std::vector<RobotState>;

/// Wraps an angle to (-pi, pi].
double wrap_angle(double a);

double clamp_control(double u, double u_max);

/// One explicit-Euler step of the bicycle kinematics with fixed speed.
/// The control is clamped to +/- u_max before use.
RobotState step(const RobotState& state, double u, const AgentParams& params);

Trajectory rollout(const RobotState& state0, const ControlSequence& controls,
                   const AgentParams& params);

}  // namespace escort
