#include "escort/rewards.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace escort {

RewardVariant parse_variant(const std::string& name) {
  if (name == "blind") return RewardVariant::Blind;
  if (name == "mi-ucb") return RewardVariant::MiUcb;
  if (name == "si") return RewardVariant::Si;
  if (name == "se") return RewardVariant::Se;
  throw std::invalid_argument("unknown reward variant: " + name);
}

std::string to_string(RewardVariant v) {
  switch (v) {
    case RewardVariant::Blind: return "blind";
    case RewardVariant::MiUcb: return "mi-ucb";
    case RewardVariant::Si: return "si";
    case RewardVariant::Se: return "se";
  }
  return "?";
}

double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("binary_entropy: p outside [0, 1]");
  }
  if (p == 0.0 || p == 1.0) return 0.0;
  return -p * std::log(p) - (1.0 - p) * std::log1p(-p);
}

// ---------------------------------------------------------------------------
// PaReward

PaReward::PaReward(RewardContext ctx, RobotState own_state, AgentParams own_params)
    : ctx_(std::move(ctx)), state_(own_state), params_(own_params) {}

void PaReward::begin_iteration(std::uint64_t iter_seed) {
  Rng rng(derive_seed(iter_seed, 0x50));
  samples_ = transform_samples(
      ctx_.belief, draw_standard_normals(ctx_.n_mc, ctx_.belief.size(), rng));
}

double PaReward::evaluate(const ControlSequence& own,
                          const std::vector<ControlSequence>&, std::uint64_t) {
  const Trajectory traj = rollout(state_, own, params_);
  const double logp = log_mean_satisfaction(traj, samples_, ctx_.task);
  return std::max(logp, ctx_.log_floor);
}

// ---------------------------------------------------------------------------
// EscortReward

EscortReward::EscortReward(RewardVariant variant, RewardContext ctx,
                           RobotState own_state, AgentParams own_params,
                           ControlDistribution pa_dist, RobotState pa_state,
                           AgentParams pa_params,
                           std::vector<EscortPeer> other_escorts)
    : variant_(variant),
      ctx_(std::move(ctx)),
      state_(own_state),
      params_(own_params),
      pa_dist_(std::move(pa_dist)),
      pa_state_(pa_state),
      pa_params_(pa_params),
      others_(std::move(other_escorts)) {
  if (variant_ == RewardVariant::Blind) {
    throw std::invalid_argument("blind variant has no escort reward");
  }
  prior_chol_.reserve(ctx_.belief.size());
  for (const auto& info : ctx_.belief.info) {
    prior_chol_.push_back(covariance_cholesky(info));
  }
}

void EscortReward::begin_iteration(std::uint64_t iter_seed) {
  iter_seed_ = iter_seed;
  if (variant_ == RewardVariant::MiUcb) return;  // independent of the PA
  if (!ctx_.redraw_pa_per_candidate) {
    prepare_fixture(derive_seed(iter_seed, 0xE5));
  }
}

void EscortReward::prepare_fixture(std::uint64_t seed) {
  Rng rng(seed);
  const int n_obj = ctx_.belief.size();

  pa_trajs_.clear();
  pa_trajs_.reserve(ctx_.n_traj);
  const auto pa_controls =
      sample_controls(pa_dist_, ctx_.n_traj, pa_params_.u_max, rng);
  for (const auto& seq : pa_controls) {
    pa_trajs_.push_back(rollout(pa_state_, seq, pa_params_));
  }

  z_ = draw_standard_normals(ctx_.n_mc, n_obj, rng);

  // Prior object positions from the shared draws.
  ObjectSets prior_pos(ctx_.n_mc);
  for (int m = 0; m < ctx_.n_mc; ++m) {
    prior_pos[m].reserve(n_obj);
    for (int j = 0; j < n_obj; ++j) {
      prior_pos[m].push_back(ctx_.belief.mean[j] + prior_chol_[j] * z_[m][j]);
    }
  }

  reach_log_.assign(ctx_.n_traj, 0.0);
  for (int s = 0; s < ctx_.n_traj; ++s) {
    if (ctx_.task.reach_every_step) {
      for (const auto& p : pa_trajs_[s]) {
        reach_log_[s] += log_reach_factor(p.x, p.y, ctx_.task);
      }
    } else {
      const auto& p = pa_trajs_[s].back();
      reach_log_[s] = log_reach_factor(p.x, p.y, ctx_.task);
    }
  }

  prior_contrib_.assign(ctx_.n_traj * ctx_.n_mc, std::vector<double>(n_obj, 0.0));
  prior_logp_.assign(ctx_.n_traj * ctx_.n_mc, 0.0);
  prior_sat_.assign(ctx_.n_traj, 0.0);
  prior_entropy_.assign(ctx_.n_traj, 0.0);
  for (int s = 0; s < ctx_.n_traj; ++s) {
    double sat_acc = 0.0;
    for (int m = 0; m < ctx_.n_mc; ++m) {
      auto& contrib = prior_contrib_[s * ctx_.n_mc + m];
      double logp = reach_log_[s];
      for (int j = 0; j < n_obj; ++j) {
        double c = 0.0;
        for (const auto& p : pa_trajs_[s]) {
          c += log_avoid_factor(p.x, p.y, prior_pos[m][j], ctx_.task);
        }
        contrib[j] = c;
        logp += c;
      }
      prior_logp_[s * ctx_.n_mc + m] = logp;
      sat_acc += std::exp(logp);
    }
    prior_sat_[s] = sat_acc / static_cast<double>(ctx_.n_mc);
    prior_entropy_[s] = binary_entropy(prior_sat_[s]);
  }
}

double EscortReward::evaluate(const ControlSequence& own,
                              const std::vector<ControlSequence>& peer_controls,
                              std::uint64_t eval_seed) {
  const int n_obj = ctx_.belief.size();

  // All escort rollouts: own candidate plus the sampled peers.
  std::vector<Trajectory> trajs;
  trajs.reserve(1 + others_.size());
  trajs.push_back(rollout(state_, own, params_));
  for (std::size_t i = 0; i < others_.size(); ++i) {
    trajs.push_back(rollout(others_[i].state, peer_controls[i], others_[i].params));
  }

  // Predicted in-range counts against belief means, initial poses excluded.
  const double range_sq = ctx_.sensor.range * ctx_.sensor.range;
  std::vector<int> hits(n_obj, 0);
  for (const auto& traj : trajs) {
    for (std::size_t k = 1; k < traj.size(); ++k) {
      for (int j = 0; j < n_obj; ++j) {
        const double dx = ctx_.belief.mean[j].x() - traj[k].x;
        const double dy = ctx_.belief.mean[j].y() - traj[k].y;
        if (dx * dx + dy * dy < range_sq) ++hits[j];
      }
    }
  }

  std::vector<int> touched;
  for (int j = 0; j < n_obj; ++j) {
    if (hits[j] > 0) touched.push_back(j);
  }
  if (touched.empty()) return 0.0;  // no information to gain

  const double inv_var = 1.0 / ctx_.sensor.noise_var;

  if (variant_ == RewardVariant::MiUcb) {
    double gain = 0.0;
    for (int j : touched) {
      const Eigen::Matrix2d post =
          ctx_.belief.info[j] + hits[j] * inv_var * Eigen::Matrix2d::Identity();
      gain += 0.5 * (std::log(post.determinant()) -
                     std::log(ctx_.belief.info[j].determinant()));
    }
    return gain;
  }

  if (ctx_.redraw_pa_per_candidate) {
    prepare_fixture(derive_seed(eval_seed, 0xE5));
  }

  // Posterior avoid contributions for the touched objects only; everything
  // else is shared with the prior via the common draws.
  std::vector<std::vector<Eigen::Vector2d>> post_pos(touched.size());
  for (std::size_t ti = 0; ti < touched.size(); ++ti) {
    const int j = touched[ti];
    const Eigen::Matrix2d post_info =
        ctx_.belief.info[j] + hits[j] * inv_var * Eigen::Matrix2d::Identity();
    const Eigen::Matrix2d chol = covariance_cholesky(post_info);
    post_pos[ti].reserve(ctx_.n_mc);
    for (int m = 0; m < ctx_.n_mc; ++m) {
      post_pos[ti].push_back(ctx_.belief.mean[j] + chol * z_[m][j]);
    }
  }

  std::vector<int> touched_slot(n_obj, -1);
  for (std::size_t ti = 0; ti < touched.size(); ++ti) touched_slot[touched[ti]] = ti;

  double acc = 0.0;
  std::vector<double> new_contrib(touched.size());
  for (int s = 0; s < ctx_.n_traj; ++s) {
    double post_sat = 0.0;
    for (int m = 0; m < ctx_.n_mc; ++m) {
      const auto& contrib = prior_contrib_[s * ctx_.n_mc + m];
      for (std::size_t ti = 0; ti < touched.size(); ++ti) {
        double c = 0.0;
        for (const auto& p : pa_trajs_[s]) {
          c += log_avoid_factor(p.x, p.y, post_pos[ti][m], ctx_.task);
        }
        new_contrib[ti] = c;
      }
      double logp = prior_logp_[s * ctx_.n_mc + m];
      if (std::isinf(logp)) {
        // Annihilated prior factor: the delta form would be NaN, so rebuild
        // the sum with the touched contributions swapped in.
        logp = reach_log_[s];
        for (int j = 0; j < n_obj; ++j) {
          logp += touched_slot[j] >= 0 ? new_contrib[touched_slot[j]] : contrib[j];
        }
      } else {
        for (std::size_t ti = 0; ti < touched.size(); ++ti) {
          logp += new_contrib[ti] - contrib[touched[ti]];
        }
      }
      post_sat += std::exp(logp);
    }
    post_sat /= static_cast<double>(ctx_.n_mc);
    if (variant_ == RewardVariant::Si) {
      acc += post_sat - prior_sat_[s];
    } else {  // Se
      acc += prior_entropy_[s] - binary_entropy(post_sat);
    }
  }
  return acc / static_cast<double>(ctx_.n_traj);
}

}  // namespace escort
