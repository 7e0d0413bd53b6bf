#include "escort/belief.hpp"

#include <cmath>
#include <stdexcept>

namespace escort {

namespace {

bool in_range(double ox, double oy, double px, double py, double range) {
  const double dx = ox - px;
  const double dy = oy - py;
  return dx * dx + dy * dy < range * range;  // strict
}

double log_det2(const Eigen::Matrix2d& m) {
  const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  if (!(det > 0.0) || !(m(0, 0) > 0.0)) {
    throw std::invalid_argument("information matrix is not SPD");
  }
  return std::log(det);
}

}  // namespace

Eigen::Matrix2d covariance_cholesky(const Eigen::Matrix2d& info) {
  const Eigen::Matrix2d cov = info.inverse();
  Eigen::Matrix2d l = Eigen::Matrix2d::Zero();
  l(0, 0) = std::sqrt(cov(0, 0));
  l(1, 0) = cov(1, 0) / l(0, 0);
  const double d = cov(1, 1) - l(1, 0) * l(1, 0);
  l(1, 1) = std::sqrt(std::max(d, 0.0));
  return l;
}

ObjectBelief ObjectBelief::isotropic(const std::vector<Eigen::Vector2d>& means,
                                     double variance) {
  ObjectBelief b;
  b.mean = means;
  b.info.assign(means.size(), Eigen::Matrix2d::Identity() / variance);
  return b;
}

std::vector<Measurement> simulate_measurements(const ObjectSet& truth,
                                               const RobotState& sensor_state,
                                               const SensorParams& sensor,
                                               Rng& rng, int time) {
  std::vector<Measurement> out;
  const double sigma = std::sqrt(sensor.noise_var);
  for (int i = 0; i < static_cast<int>(truth.size()); ++i) {
    if (!in_range(truth[i].x(), truth[i].y(), sensor_state.x, sensor_state.y,
                  sensor.range)) {
      continue;
    }
    Measurement m;
    m.object_id = i;
    m.value = truth[i] + sigma * Eigen::Vector2d(rng.normal(), rng.normal());
    m.sensor_pose = sensor_state;
    m.time = time;
    out.push_back(m);
  }
  return out;
}

ObjectBelief update(const ObjectBelief& belief,
                    const std::vector<Measurement>& measurements,
                    const SensorParams& sensor) {
  ObjectBelief out = belief;
  const double inv_var = 1.0 / sensor.noise_var;
  // Accumulate information-weighted sums per object, then solve once.
  std::vector<Eigen::Vector2d> weighted(belief.size(), Eigen::Vector2d::Zero());
  std::vector<int> counts(belief.size(), 0);
  for (const auto& m : measurements) {
    if (m.object_id < 0 || m.object_id >= belief.size()) {
      throw std::invalid_argument("measurement references unknown object");
    }
    // Spurious measurement: value outside sensing range of the pose.
    if (!in_range(m.value.x(), m.value.y(), m.sensor_pose.x, m.sensor_pose.y,
                  sensor.range)) {
      continue;
    }
    weighted[m.object_id] += inv_var * m.value;
    counts[m.object_id] += 1;
  }
  for (int i = 0; i < belief.size(); ++i) {
    if (counts[i] == 0) continue;
    const Eigen::Matrix2d info_new =
        belief.info[i] + counts[i] * inv_var * Eigen::Matrix2d::Identity();
    const double det = info_new.determinant();
    if (!(det > 0.0)) {
      throw std::runtime_error("belief update produced a singular information matrix");
    }
    out.info[i] = info_new;
    out.mean[i] = info_new.inverse() * (belief.info[i] * belief.mean[i] + weighted[i]);
  }
  return out;
}

ObjectBelief predict_information(const ObjectBelief& belief,
                                 const std::vector<Trajectory>& escort_trajectories,
                                 const SensorParams& sensor) {
  ObjectBelief out = belief;
  const double inv_var = 1.0 / sensor.noise_var;
  for (int i = 0; i < belief.size(); ++i) {
    int hits = 0;
    for (const auto& traj : escort_trajectories) {
      for (std::size_t k = 1; k < traj.size(); ++k) {
        if (in_range(belief.mean[i].x(), belief.mean[i].y(), traj[k].x,
                     traj[k].y, sensor.range)) {
          ++hits;
        }
      }
    }
    if (hits > 0) {
      out.info[i] += hits * inv_var * Eigen::Matrix2d::Identity();
    }
  }
  return out;
}

ObjectSets draw_standard_normals(int n, int n_objects, Rng& rng) {
  ObjectSets z(n);
  for (auto& set : z) {
    set.reserve(n_objects);
    for (int i = 0; i < n_objects; ++i) {
      set.emplace_back(rng.normal(), rng.normal());
    }
  }
  return z;
}

ObjectSets transform_samples(const ObjectBelief& belief, const ObjectSets& z) {
  std::vector<Eigen::Matrix2d> chol;
  chol.reserve(belief.size());
  for (const auto& info : belief.info) chol.push_back(covariance_cholesky(info));

  ObjectSets out(z.size());
  for (std::size_t s = 0; s < z.size(); ++s) {
    out[s].reserve(belief.size());
    for (int i = 0; i < belief.size(); ++i) {
      out[s].push_back(belief.mean[i] + chol[i] * z[s][i]);
    }
  }
  return out;
}

ObjectSets sample_objects(const ObjectBelief& belief, int n, Rng& rng) {
  return transform_samples(belief, draw_standard_normals(n, belief.size(), rng));
}

double information_gain(const ObjectBelief& prior, const ObjectBelief& predicted) {
  if (prior.size() != predicted.size()) {
    throw std::invalid_argument("belief sizes differ");
  }
  double gain = 0.0;
  for (int i = 0; i < prior.size(); ++i) {
    gain += 0.5 * (log_det2(predicted.info[i]) - log_det2(prior.info[i]));
  }
  return gain;
}

}  // namespace escort
