#include "escort/task.hpp"

#include <algorithm>
#include <limits>

namespace escort {

double avoid_factor(const RobotState& state, const Eigen::Vector2d& object,
                    const ReachAvoidTask& task) {
  return std::exp(log_avoid_factor(state.x, state.y, object, task));
}

double reach_factor(const RobotState& state, const ReachAvoidTask& task) {
  return std::exp(log_reach_factor(state.x, state.y, task));
}

double log_satisfaction_given_objects(const Trajectory& traj,
                                      const ObjectSet& objects,
                                      const ReachAvoidTask& task) {
  double logp = 0.0;
  for (const auto& s : traj) {
    for (const auto& o : objects) {
      logp += log_avoid_factor(s.x, s.y, o, task);
    }
  }
  if (task.reach_every_step) {
    for (const auto& s : traj) logp += log_reach_factor(s.x, s.y, task);
  } else if (!traj.empty()) {
    logp += log_reach_factor(traj.back().x, traj.back().y, task);
  }
  return logp;
}

double satisfaction_given_objects(const Trajectory& traj,
                                  const ObjectSet& objects,
                                  const ReachAvoidTask& task) {
  return std::exp(log_satisfaction_given_objects(traj, objects, task));
}

double log_mean_satisfaction(const Trajectory& traj, const ObjectSets& sets,
                             const ReachAvoidTask& task) {
  std::vector<double> logs;
  logs.reserve(sets.size());
  double max_log = -std::numeric_limits<double>::infinity();
  for (const auto& objects : sets) {
    const double l = log_satisfaction_given_objects(traj, objects, task);
    logs.push_back(l);
    max_log = std::max(max_log, l);
  }
  if (!std::isfinite(max_log)) return max_log;  // all factors annihilated
  double acc = 0.0;
  for (double l : logs) acc += std::exp(l - max_log);
  return max_log + std::log(acc / static_cast<double>(logs.size()));
}

double satisfaction_over_samples(const Trajectory& traj, const ObjectSets& sets,
                                 const ReachAvoidTask& task) {
  return std::exp(log_mean_satisfaction(traj, sets, task));
}

double marginal_satisfaction(const Trajectory& traj, const ObjectBelief& belief,
                             const ReachAvoidTask& task, int n_mc, Rng& rng) {
  return satisfaction_over_samples(traj, sample_objects(belief, n_mc, rng), task);
}

double posterior_satisfaction(const Trajectory& traj,
                              const ObjectBelief& predicted_belief,
                              const ReachAvoidTask& task, int n_mc, Rng& rng) {
  return satisfaction_over_samples(traj, sample_objects(predicted_belief, n_mc, rng),
                                   task);
}

}  // namespace escort
