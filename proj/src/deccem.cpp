#include "escort/deccem.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace escort {

double ControlDistribution::mean_variance() const {
  if (var.empty()) return 0.0;
  return std::accumulate(var.begin(), var.end(), 0.0) / static_cast<double>(var.size());
}

ControlDistribution ControlDistribution::prior(int horizon, double sigma0_sq) {
  ControlDistribution d;
  d.mean.assign(horizon, 0.0);
  d.var.assign(horizon, sigma0_sq);
  return d;
}

std::vector<ControlSequence> sample_controls(const ControlDistribution& dist,
                                             int n, double u_max, Rng& rng) {
  const int horizon = dist.horizon();
  std::vector<ControlSequence> out(n);
  for (auto& seq : out) {
    seq.resize(horizon);
    for (int k = 0; k < horizon; ++k) {
      seq[k] = clamp_control(rng.normal(dist.mean[k], std::sqrt(dist.var[k])), u_max);
    }
  }
  return out;
}

std::vector<int> elite_indices(const std::vector<double>& rewards, int n_elite) {
  if (static_cast<int>(rewards.size()) < n_elite) {
    throw std::invalid_argument("fewer samples than n_elite");
  }
  std::vector<int> order(rewards.size());
  std::iota(order.begin(), order.end(), 0);
  // Ties broken by lower sample index.
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return rewards[a] > rewards[b]; });
  order.resize(n_elite);
  return order;
}

std::vector<ControlSequence> elite_select(const std::vector<ControlSequence>& samples,
                                          const std::vector<double>& rewards,
                                          int n_elite) {
  if (samples.size() != rewards.size()) {
    throw std::invalid_argument("samples and rewards size mismatch");
  }
  std::vector<ControlSequence> out;
  out.reserve(n_elite);
  for (int i : elite_indices(rewards, n_elite)) out.push_back(samples[i]);
  return out;
}

ControlDistribution fit_gaussian(const std::vector<ControlSequence>& elite,
                                 const CemConfig& cfg) {
  if (elite.empty()) throw std::invalid_argument("empty elite set");
  const int horizon = static_cast<int>(elite.front().size());
  const double n = static_cast<double>(elite.size());
  ControlDistribution d;
  d.mean.assign(horizon, 0.0);
  d.var.assign(horizon, 0.0);
  for (const auto& seq : elite) {
    for (int k = 0; k < horizon; ++k) d.mean[k] += seq[k];
  }
  for (int k = 0; k < horizon; ++k) d.mean[k] /= n;
  for (const auto& seq : elite) {
    for (int k = 0; k < horizon; ++k) {
      const double dev = seq[k] - d.mean[k];
      d.var[k] += dev * dev;
    }
  }
  for (int k = 0; k < horizon; ++k) {
    d.var[k] = std::max(d.var[k] / n, cfg.var_floor);  // population variance
  }
  return d;
}

DecCemResult dec_cem(const ControlDistribution& own_dist, RewardFunction& reward,
                     const PeerDists& peers, const CemConfig& cfg, double u_max,
                     Rng& rng) {
  DecCemResult result;
  result.dist = own_dist;

  for (int iter = 0; iter < cfg.n_inner_iters; ++iter) {
    const std::uint64_t iter_seed = rng.next_u64();
    const auto candidates = sample_controls(result.dist, cfg.n_samples, u_max, rng);

    // One joint peer draw per own candidate.
    std::vector<std::vector<ControlSequence>> peer_samples(cfg.n_samples);
    for (int i = 0; i < cfg.n_samples; ++i) {
      peer_samples[i].reserve(peers.size());
      for (const auto& p : peers) {
        ControlSequence seq(p.dist.horizon());
        for (int k = 0; k < p.dist.horizon(); ++k) {
          seq[k] = clamp_control(rng.normal(p.dist.mean[k], std::sqrt(p.dist.var[k])),
                                 p.u_max);
        }
        peer_samples[i].push_back(std::move(seq));
      }
    }

    reward.begin_iteration(iter_seed);
    std::vector<double> rewards(cfg.n_samples);
    for (int i = 0; i < cfg.n_samples; ++i) {
      rewards[i] = reward.evaluate(candidates[i], peer_samples[i],
                                   derive_seed(iter_seed, i));
    }

    const auto idx = elite_indices(rewards, cfg.n_elite);
    std::vector<ControlSequence> elite;
    elite.reserve(cfg.n_elite);
    for (int i : idx) elite.push_back(candidates[i]);
    result.dist = fit_gaussian(elite, cfg);
    result.best_reward = rewards[idx.front()];
    result.iterations_run = iter + 1;

    if (result.dist.mean_variance() < cfg.var_terminate) break;
  }
  return result;
}

}  // namespace escort
