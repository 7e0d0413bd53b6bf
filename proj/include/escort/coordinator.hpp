#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "escort/belief.hpp"
#include "escort/config.hpp"
#include "escort/deccem.hpp"
#include "escort/rewards.hpp"

namespace escort {

enum class Role { Principal, Escort };

struct DistributionMessage {
  int sender = 0;
  ControlDistribution dist;
  std::uint64_t epoch = 0;
  double timestamp = 0.0;
};

/// Latest-value store: at most one message per peer, newest epoch wins.
class Mailbox {
 public:
  /// Returns true when the message was accepted (newer epoch than stored).
  bool deliver(const DistributionMessage& msg);
  const DistributionMessage* latest(int peer) const;
  std::size_t size() const { return latest_.size(); }
  void clear() { latest_.clear(); }

 private:
  std::map<int, DistributionMessage> latest_;
};

struct PeerSnapshot {
  int id = 0;
  Role role = Role::Escort;
  RobotState state;
  AgentParams params;
};

struct PlannerState {
  int id = 0;
  Role role = Role::Principal;
  RewardVariant variant = RewardVariant::Blind;
  RobotState state;
  AgentParams params;
  ControlDistribution dist;
  ObjectBelief belief;
  std::uint64_t epoch = 0;
};

/// Belief update with this tick's shared measurements and re-initialization
/// of the control distribution to the prior.
void begin_tick(PlannerState& planner,
                const std::vector<Measurement>& measurements,
                const FullConfig& cfg);

/// One communication round: read latest peer distributions from the mailbox
/// (absent peers fall back to the prior), run dec_cem, return the message to
/// broadcast. Never blocks on missing peers.
DistributionMessage plan_round(PlannerState& planner, const Mailbox& mailbox,
                               const std::vector<PeerSnapshot>& peers,
                               const FullConfig& cfg, Rng& rng,
                               double* best_reward = nullptr);

/// First-timestep control of the final distribution; mean by default,
/// sampled when cfg.execute_mean is false.
double finish_tick(const PlannerState& planner, const FullConfig& cfg, Rng& rng);

/// Transport used by the self-contained plan_step. receive() returns all
/// messages pending for the robot; broadcast() hands off an outgoing one.
class Comms {
 public:
  virtual ~Comms() = default;
  virtual std::vector<DistributionMessage> receive(int robot) = 0;
  virtual void broadcast(const DistributionMessage& msg) = 0;
};

/// Full per-tick planning loop for one robot: belief update, fixed number
/// of receive / dec_cem / broadcast rounds, then the executed control.
double plan_step(PlannerState& planner,
                 const std::vector<Measurement>& measurements, Comms& comms,
                 Mailbox& mailbox, const std::vector<PeerSnapshot>& peers,
                 const FullConfig& cfg, Rng& rng);

/// Delivers each message to every other robot's mailbox independently with
/// probability 1 - drop_probability. Mailboxes are aligned with owner_ids.
void exchange(std::vector<Mailbox>& mailboxes,
              const std::vector<DistributionMessage>& messages,
              double drop_probability, Rng& rng,
              const std::vector<int>& owner_ids);

}  // namespace escort
