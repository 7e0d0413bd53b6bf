#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "escort/config.hpp"
#include "escort/coordinator.hpp"

namespace escort {

enum class Verdict { Reached, Collided, Timeout };

std::string to_string(Verdict v);

struct Scenario {
  ObjectSet truth;
  ObjectBelief prior;
  std::vector<RobotState> starts;  // index 0 is the PA
};

/// Objects uniform in the spawn box; belief means are the true positions
/// corrupted with prior-variance Gaussian noise, clipped to the environment.
Scenario generate_scenario(const FullConfig& cfg, Rng& rng);

/// Swept-segment collision test: true iff any true object lies within
/// `radius` of the segment from `from` to `to`.
bool collision_check(const RobotState& from, const RobotState& to,
                     const ObjectSet& truth, double radius);

struct TickRecord {
  int tick = 0;
  std::vector<RobotState> states;    // post-step, aligned with robot ids
  std::vector<double> controls;      // executed this tick
  std::vector<double> rewards;       // best elite reward of the last round
  std::vector<Eigen::Vector2d> belief_mean;
  std::vector<Eigen::Vector2d> belief_var;  // per-object marginal variances
  int n_measurements = 0;
};

struct MessageEvent {
  double t_send = 0.0;
  double t_deliver = 0.0;  // < 0 when dropped
  int sender = 0;
  int recipient = 0;
  std::uint64_t epoch = 0;
};

struct EpisodeLog {
  FullConfig config;
  ObjectSet truth;
  std::vector<RobotState> initial_states;
  std::vector<TickRecord> ticks;
  std::vector<MessageEvent> trace;  // async scheduler only
  Verdict verdict = Verdict::Timeout;
  int final_tick = 0;
};

EpisodeLog run_episode(const FullConfig& cfg);

std::string episode_to_jsonl(const EpisodeLog& log);
EpisodeLog episode_from_jsonl(const std::string& text);

/// Replays logged controls open-loop through the dynamics and checks the
/// logged trajectories are reproduced exactly.
bool replay_matches(const EpisodeLog& log);

struct BatchCell {
  std::string variant;
  int n_escorts = 0;
  int n_episodes = 0;
  double failure_rate = 0.0;
  double timeout_rate = 0.0;
  double mean_ticks_to_goal = 0.0;  // NaN when no episode reached the goal
};

/// Paired batch: environment k uses the same scenario seed in every
/// (variant, n_escorts) cell. Blind cells force zero escorts, so their
/// results are identical across escort settings. Episode results are
/// independent of the worker count.
std::vector<BatchCell> batch_evaluate(const FullConfig& base,
                                      const std::vector<std::string>& variants,
                                      const std::vector<int>& escort_settings,
                                      int n_envs, int workers);

std::string batch_to_csv(const std::vector<BatchCell>& cells);

}  // namespace escort
