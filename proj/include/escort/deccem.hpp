#pragma once

#include <cstdint>
#include <vector>

#include "escort/dynamics.hpp"
#include "escort/random.hpp"

namespace escort {

/// Per-timestep independent Gaussian over one robot's controls.
struct ControlDistribution {
  std::vector<double> mean;
  std::vector<double> var;

  int horizon() const { return static_cast<int>(mean.size()); }
  double mean_variance() const;

  static ControlDistribution prior(int horizon, double sigma0_sq);
};

struct CemConfig {
  int n_samples = 64;
  int n_elite = 8;
  int n_inner_iters = 5;
  double var_floor = 1e-4;      // [rad/s]^2
  double var_terminate = 1e-3;  // stop when mean variance falls below
  double sigma0_sq = 1.0;       // initial variance
};

/// Reward callback for dec_cem. begin_iteration fixes any per-iteration
/// sample fixtures (common random numbers across candidates); evaluate must
/// be a pure function of its arguments and the fixtures.
class RewardFunction {
 public:
  virtual ~RewardFunction() = default;
  virtual void begin_iteration(std::uint64_t iter_seed) = 0;
  virtual double evaluate(const ControlSequence& own,
                          const std::vector<ControlSequence>& peer_controls,
                          std::uint64_t eval_seed) = 0;
};

/// Another robot's communicated control distribution plus its control bound.
struct PeerDist {
  ControlDistribution dist;
  double u_max = M_PI / 2.0;
};
using PeerDists = std::vector<PeerDist>;

/// n independent draws, clamped to +/- u_max per timestep.
std::vector<ControlSequence> sample_controls(const ControlDistribution& dist,
                                             int n, double u_max, Rng& rng);

/// Indices of the n_elite highest rewards, ties broken by lower index.
/// Throws std::invalid_argument when fewer rewards than n_elite.
std::vector<int> elite_indices(const std::vector<double>& rewards, int n_elite);

std::vector<ControlSequence> elite_select(const std::vector<ControlSequence>& samples,
                                          const std::vector<double>& rewards,
                                          int n_elite);

/// Per-timestep sample mean and population variance, floored at var_floor.
ControlDistribution fit_gaussian(const std::vector<ControlSequence>& elite,
                                 const CemConfig& cfg);

struct DecCemResult {
  ControlDistribution dist;
  // Best elite reward of the last completed iteration; -inf when
  // n_inner_iters == 0.
  double best_reward = -std::numeric_limits<double>::infinity();
  int iterations_run = 0;
};

/// One robot's control-distribution update given the latest peer
/// distributions. Peer controls are re-drawn jointly for every own candidate.
/// Candidate reward evaluations use seeds derived per (iteration, candidate),
/// so results do not depend on evaluation order.
DecCemResult dec_cem(const ControlDistribution& own_dist, RewardFunction& reward,
                     const PeerDists& peers, const CemConfig& cfg, double u_max,
                     Rng& rng);

}  // namespace escort
