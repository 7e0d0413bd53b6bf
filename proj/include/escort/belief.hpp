#pragma once

#include <Eigen/Dense>
#include <vector>

#include "escort/dynamics.hpp"
#include "escort/random.hpp"

namespace escort {

struct SensorParams {
  double range = 10.0;     // radial sensing range R_S [m]
  double noise_var = 1.0;  // isotropic measurement noise variance [m^2]
};

struct Measurement {
  int object_id = 0;
  Eigen::Vector2d value = Eigen::Vector2d::Zero();
  RobotState sensor_pose;
  int time = 0;
};

/// One joint assignment of all object positions.
using ObjectSet = std::vector<Eigen::Vector2d>;
using ObjectSets = std::vector<ObjectSet>;

/// Gaussian belief over object locations in information form. Objects are
/// mutually independent, so the joint is block-diagonal with 2x2 blocks.
struct ObjectBelief {
  std::vector<Eigen::Vector2d> mean;
  std::vector<Eigen::Matrix2d> info;

  int size() const { return static_cast<int>(mean.size()); }
  Eigen::Matrix2d covariance(int i) const { return info[i].inverse(); }

  static ObjectBelief isotropic(const std::vector<Eigen::Vector2d>& means,
                                double variance);
};

/// Noisy position measurements of every object strictly inside sensing range.
std::vector<Measurement> simulate_measurements(const ObjectSet& truth,
                                               const RobotState& sensor_state,
                                               const SensorParams& sensor,
                                               Rng& rng, int time = 0);

/// Information-form measurement update. Measurements whose value lies outside
/// sensing range of their pose are spurious and dropped.
ObjectBelief update(const ObjectBelief& belief,
                    const std::vector<Measurement>& measurements,
                    const SensorParams& sensor);

/// Propagates the information matrices along planned escort trajectories,
/// keeping means unchanged. A predicted pose contributes when it is strictly
/// within sensing range of the object's belief mean (the planner's location
/// proxy); the initial pose traj[0] is excluded, its measurement is already
/// in the belief.
ObjectBelief predict_information(const ObjectBelief& belief,
                                 const std::vector<Trajectory>& escort_trajectories,
                                 const SensorParams& sensor);

/// n sets of independent standard-normal draws, one 2-vector per object.
ObjectSets draw_standard_normals(int n, int n_objects, Rng& rng);

/// Maps standard-normal draws through each object's mean and covariance
/// Cholesky factor. Shared draws give common random numbers across beliefs.
ObjectSets transform_samples(const ObjectBelief& belief, const ObjectSets& z);

ObjectSets sample_objects(const ObjectBelief& belief, int n, Rng& rng);

/// Lower-triangular Cholesky factor of the covariance info^-1.
Eigen::Matrix2d covariance_cholesky(const Eigen::Matrix2d& info);

/// Shannon information gain between prior and predicted beliefs [nats]:
/// 0.5 * sum_i (log det info'_i - log det info_i). Throws on non-SPD input.
double information_gain(const ObjectBelief& prior, const ObjectBelief& predicted);

}  // namespace escort
