#pragma once

#include <memory>
#include <string>
#include <vector>

#include "escort/belief.hpp"
#include "escort/deccem.hpp"
#include "escort/task.hpp"

namespace escort {

enum class RewardVariant { Blind, MiUcb, Si, Se };

RewardVariant parse_variant(const std::string& name);
std::string to_string(RewardVariant v);

/// Binary entropy in nats, with 0 log 0 := 0. Throws std::invalid_argument
/// outside [0, 1].
double binary_entropy(double p);

struct RewardContext {
  ObjectBelief belief;
  ReachAvoidTask task;
  SensorParams sensor;
  int n_traj = 10;          // PA-trajectory samples per escort evaluation
  int n_mc = 30;            // object samples per satisfaction estimate
  double log_floor = -1e6;  // floor on the PA's log-satisfaction reward
  // Re-draw the PA trajectory fixture per candidate instead of per iteration.
  bool redraw_pa_per_candidate = false;
};

/// Marginal log probability of task satisfaction of the PA's own plan.
/// Ignores peer controls. Object samples are fixed per iteration so all
/// candidates in an iteration see identical draws.
class PaReward : public RewardFunction {
 public:
  PaReward(RewardContext ctx, RobotState own_state, AgentParams own_params);

  void begin_iteration(std::uint64_t iter_seed) override;
  double evaluate(const ControlSequence& own,
                  const std::vector<ControlSequence>& peer_controls,
                  std::uint64_t eval_seed) override;

 private:
  RewardContext ctx_;
  RobotState state_;
  AgentParams params_;
  ObjectSets samples_;
};

struct EscortPeer {
  int id = 0;
  RobotState state;
  AgentParams params;
};

/// The three escort rewards. SI and SE share one PA-trajectory fixture and
/// one object-draw fixture per iteration (common random numbers), so both
/// return exactly 0 for plans with no predicted in-range measurement.
class EscortReward : public RewardFunction {
 public:
  EscortReward(RewardVariant variant, RewardContext ctx, RobotState own_state,
               AgentParams own_params, ControlDistribution pa_dist,
               RobotState pa_state, AgentParams pa_params,
               std::vector<EscortPeer> other_escorts);

  void begin_iteration(std::uint64_t iter_seed) override;
  /// peer_controls are aligned with the other_escorts given at construction.
  double evaluate(const ControlSequence& own,
                  const std::vector<ControlSequence>& peer_controls,
                  std::uint64_t eval_seed) override;

 private:
  void prepare_fixture(std::uint64_t seed);

  RewardVariant variant_;
  RewardContext ctx_;
  RobotState state_;
  AgentParams params_;
  ControlDistribution pa_dist_;
  RobotState pa_state_;
  AgentParams pa_params_;
  std::vector<EscortPeer> others_;
  std::uint64_t iter_seed_ = 0;

  // Iteration fixture.
  std::vector<Trajectory> pa_trajs_;
  ObjectSets z_;  // standard-normal draws, shared prior/posterior
  // Per (pa sample, object set): reach log-sum and per-object avoid
  // log-contributions under the prior belief.
  std::vector<double> reach_log_;                      // [s]
  std::vector<std::vector<double>> prior_contrib_;     // [s*n_mc][n_obj]
  std::vector<double> prior_logp_;                     // [s*n_mc]
  std::vector<double> prior_sat_;                      // [s]
  std::vector<double> prior_entropy_;                  // [s]
  std::vector<Eigen::Matrix2d> prior_chol_;            // [n_obj]
};

}  // namespace escort
