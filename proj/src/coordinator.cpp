#include "escort/coordinator.hpp"

#include <algorithm>
#include <stdexcept>

namespace escort {

bool Mailbox::deliver(const DistributionMessage& msg) {
  auto it = latest_.find(msg.sender);
  if (it != latest_.end() && it->second.epoch >= msg.epoch) return false;
  latest_[msg.sender] = msg;
  return true;
}

const DistributionMessage* Mailbox::latest(int peer) const {
  auto it = latest_.find(peer);
  return it == latest_.end() ? nullptr : &it->second;
}

void begin_tick(PlannerState& planner,
                const std::vector<Measurement>& measurements,
                const FullConfig& cfg) {
  planner.belief = update(planner.belief, measurements, cfg.sensor());
  planner.dist = ControlDistribution::prior(cfg.horizon, cfg.cem.sigma0_sq);
}

namespace {

ControlDistribution peer_dist_or_prior(const Mailbox& mailbox, int peer,
                                       const FullConfig& cfg) {
  const DistributionMessage* msg = mailbox.latest(peer);
  if (msg != nullptr) return msg->dist;
  // Never-received peers are assumed to still hold the initial prior.
  return ControlDistribution::prior(cfg.horizon, cfg.cem.sigma0_sq);
}

RewardContext make_context(const PlannerState& planner, const FullConfig& cfg) {
  RewardContext ctx;
  ctx.belief = planner.belief;
  ctx.task = cfg.task();
  ctx.sensor = cfg.sensor();
  ctx.n_traj = cfg.n_traj;
  ctx.n_mc = cfg.n_mc;
  ctx.log_floor = cfg.log_floor;
  ctx.redraw_pa_per_candidate = cfg.redraw_pa_samples;
  return ctx;
}

}  // namespace

DistributionMessage plan_round(PlannerState& planner, const Mailbox& mailbox,
                               const std::vector<PeerSnapshot>& peers,
                               const FullConfig& cfg, Rng& rng,
                               double* best_reward) {
  std::unique_ptr<RewardFunction> reward;
  PeerDists cem_peers;

  if (planner.role == Role::Principal) {
    // The PA reward depends only on its own plan and the current belief.
    reward = std::make_unique<PaReward>(make_context(planner, cfg),
                                        planner.state, planner.params);
  } else {
    const PeerSnapshot* pa = nullptr;
    std::vector<EscortPeer> other_escorts;
    for (const auto& p : peers) {
      if (p.id == planner.id) continue;
      if (p.role == Role::Principal) {
        pa = &p;
      } else {
        other_escorts.push_back({p.id, p.state, p.params});
        cem_peers.push_back({peer_dist_or_prior(mailbox, p.id, cfg), p.params.u_max});
      }
    }
    if (pa == nullptr) {
      throw std::invalid_argument("escort planner requires a principal peer");
    }
    reward = std::make_unique<EscortReward>(
        planner.variant, make_context(planner, cfg), planner.state,
        planner.params, peer_dist_or_prior(mailbox, pa->id, cfg), pa->state,
        pa->params, std::move(other_escorts));
  }

  const DecCemResult result = dec_cem(planner.dist, *reward, cem_peers, cfg.cem,
                                      planner.params.u_max, rng);
  planner.dist = result.dist;
  planner.epoch += 1;
  if (best_reward != nullptr) *best_reward = result.best_reward;

  return {planner.id, planner.dist, planner.epoch, 0.0};
}

double finish_tick(const PlannerState& planner, const FullConfig& cfg, Rng& rng) {
  if (planner.dist.horizon() == 0) return 0.0;
  double u = planner.dist.mean[0];
  if (!cfg.execute_mean) {
    u = rng.normal(planner.dist.mean[0], std::sqrt(planner.dist.var[0]));
  }
  return clamp_control(u, planner.params.u_max);
}

double plan_step(PlannerState& planner,
                 const std::vector<Measurement>& measurements, Comms& comms,
                 Mailbox& mailbox, const std::vector<PeerSnapshot>& peers,
                 const FullConfig& cfg, Rng& rng) {
  begin_tick(planner, measurements, cfg);
  for (int round = 0; round < cfg.outer_rounds; ++round) {
    for (const auto& msg : comms.receive(planner.id)) mailbox.deliver(msg);
    comms.broadcast(plan_round(planner, mailbox, peers, cfg, rng));
  }
  return finish_tick(planner, cfg, rng);
}

void exchange(std::vector<Mailbox>& mailboxes,
              const std::vector<DistributionMessage>& messages,
              double drop_probability, Rng& rng,
              const std::vector<int>& owner_ids) {
  for (const auto& msg : messages) {
    for (std::size_t i = 0; i < mailboxes.size(); ++i) {
      if (owner_ids[i] == msg.sender) continue;
      // One independent loss draw per (message, recipient).
      const double roll = rng.uniform();
      if (roll < drop_probability) continue;
      mailboxes[i].deliver(msg);
    }
  }
}

}  // namespace escort
