#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "escort/belief.hpp"
#include "escort/dynamics.hpp"

namespace escort {

struct ReachAvoidTask {
  Eigen::Vector2d goal = Eigen::Vector2d(90.0, 50.0);
  double r_d = 10.0;  // acceptance radius [m]
  double r_o = 4.0;   // collision radius [m]
  double p_o = 0.9;   // peak collision probability
  // Reach factor applied at every trajectory point when true, else only at
  // the final point.
  bool reach_every_step = true;
};

// Below this exponent the avoid factor differs from 1 by < 3e-20; skipping
// keeps satisfaction evaluation cheap in large sparse environments.
inline constexpr double kAvoidSkipExponent = 45.0;

/// log(1 - p_o * exp(-||pos - o||^2 / (2 r_o^2))); -inf when the factor is 0.
inline double log_avoid_factor(double px, double py, const Eigen::Vector2d& o,
                               const ReachAvoidTask& task) {
  const double dx = px - o.x();
  const double dy = py - o.y();
  const double q = (dx * dx + dy * dy) / (2.0 * task.r_o * task.r_o);
  if (q > kAvoidSkipExponent) return 0.0;
  const double f = task.p_o * std::exp(-q);
  if (f >= 1.0) return -std::numeric_limits<double>::infinity();
  return std::log1p(-f);
}

inline double log_reach_factor(double px, double py, const ReachAvoidTask& task) {
  const double dx = px - task.goal.x();
  const double dy = py - task.goal.y();
  return -(dx * dx + dy * dy) / (2.0 * task.r_d * task.r_d);
}

double avoid_factor(const RobotState& state, const Eigen::Vector2d& object,
                    const ReachAvoidTask& task);
double reach_factor(const RobotState& state, const ReachAvoidTask& task);

/// Log of the product of avoid and reach factors over all trajectory points.
double log_satisfaction_given_objects(const Trajectory& traj,
                                      const ObjectSet& objects,
                                      const ReachAvoidTask& task);

double satisfaction_given_objects(const Trajectory& traj,
                                  const ObjectSet& objects,
                                  const ReachAvoidTask& task);

/// Mean satisfaction over pre-drawn object sets (log-sum-exp, no underflow).
double log_mean_satisfaction(const Trajectory& traj, const ObjectSets& sets,
                             const ReachAvoidTask& task);

double satisfaction_over_samples(const Trajectory& traj, const ObjectSets& sets,
                                 const ReachAvoidTask& task);

/// Monte Carlo estimate of E_{O ~ belief}[P(phi | X, O)].
double marginal_satisfaction(const Trajectory& traj, const ObjectBelief& belief,
                             const ReachAvoidTask& task, int n_mc, Rng& rng);

/// Same estimator evaluated against a predicted belief.
double posterior_satisfaction(const Trajectory& traj,
                              const ObjectBelief& predicted_belief,
                              const ReachAvoidTask& task, int n_mc, Rng& rng);

}  // namespace escort
