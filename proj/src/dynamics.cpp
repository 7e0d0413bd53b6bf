#include "escort/dynamics.hpp"

#include <algorithm>

namespace escort {

double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * M_PI);  // [-pi, pi]
  if (a <= -M_PI) a = M_PI;
  return a;
}

double clamp_control(double u, double u_max) {
  return std::clamp(u, -u_max, u_max);
}

RobotState step(const RobotState& state, double u, const AgentParams& params) {
  const double uc = clamp_control(u, params.u_max);
  RobotState next;
  next.x = state.x + params.v * std::cos(state.theta) * params.dt;
  next.y = state.y + params.v * std::sin(state.theta) * params.dt;
  next.theta = wrap_angle(state.theta + uc * params.dt);
  return next;
}

Trajectory rollout(const RobotState& state0, const ControlSequence& controls,
                   const AgentParams& params) {
  Trajectory traj;
  traj.reserve(controls.size() + 1);
  traj.push_back(state0);
  for (double u : controls) {
    traj.push_back(step(traj.back(), u, params));
  }
  return traj;
}

}  // namespace escort
