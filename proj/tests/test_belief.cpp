#include <cmath>

#include "doctest.h"
#include "escort/belief.hpp"
#include "oracles.hpp"

using namespace escort;

namespace {

ObjectBelief one_object(double x, double y, double variance) {
  return ObjectBelief::isotropic({Eigen::Vector2d(x, y)}, variance);
}

}  // namespace

TEST_CASE("simulate_measurements: range gate") {
  Rng rng(1);
  const SensorParams sensor{10.0, 1.0};
  const ObjectSet truth{{100.0, 100.0}, {50.0, 50.0}};
  const auto far = simulate_measurements(truth, {0, 0, 0}, sensor, rng);
  CHECK(far.empty());
}

TEST_CASE("simulate_measurements: noiseless limit returns the true location") {
  Rng rng(2);
  const SensorParams sensor{10.0, 1e-18};
  const ObjectSet truth{{3.0, 4.0}};
  const auto ms = simulate_measurements(truth, {0, 0, 0}, sensor, rng);
  REQUIRE(ms.size() == 1);
  CHECK(ms[0].object_id == 0);
  CHECK(ms[0].value.x() == doctest::Approx(3.0).epsilon(1e-7));
  CHECK(ms[0].value.y() == doctest::Approx(4.0).epsilon(1e-7));
}

TEST_CASE("simulate_measurements: boundary distance is excluded (strict)") {
  Rng rng(3);
  const SensorParams sensor{10.0, 1.0};
  CHECK(simulate_measurements({{10.0, 0.0}}, {0, 0, 0}, sensor, rng).empty());
  CHECK(simulate_measurements({{10.0 - 1e-9, 0.0}}, {0, 0, 0}, sensor, rng).size() == 1);
}

TEST_CASE("update: scalar form with one measurement") {
  const ObjectBelief prior = one_object(5.0, 5.0, 25.0);  // info 0.04 I
  Measurement m;
  m.object_id = 0;
  m.value = {6.0, 4.0};
  m.sensor_pose = {5.0, 5.0, 0.0};
  const ObjectBelief post = update(prior, {m}, {10.0, 1.0});
  CHECK(post.info[0](0, 0) == doctest::Approx(1.04));
  CHECK(post.info[0](1, 1) == doctest::Approx(1.04));
  CHECK(post.info[0](0, 1) == doctest::Approx(0.0));
  CHECK(post.mean[0].x() == doctest::Approx((0.04 * 5.0 + 6.0) / 1.04));
  CHECK(post.mean[0].y() == doctest::Approx((0.04 * 5.0 + 4.0) / 1.04));
}

TEST_CASE("update: no measurements leaves the belief unchanged") {
  const ObjectBelief prior = one_object(5.0, 5.0, 25.0);
  const ObjectBelief post = update(prior, {}, {10.0, 1.0});
  CHECK(post.mean[0] == prior.mean[0]);
  CHECK(post.info[0] == prior.info[0]);
}

TEST_CASE("update: two simultaneous measurements add twice the innovation") {
  const ObjectBelief prior = one_object(5.0, 5.0, 25.0);
  Measurement a, b;
  a.object_id = b.object_id = 0;
  a.value = {5.5, 5.0};
  b.value = {4.5, 5.0};
  a.sensor_pose = b.sensor_pose = {5.0, 5.0, 0.0};
  const ObjectBelief post = update(prior, {a, b}, {10.0, 1.0});
  CHECK(post.info[0](0, 0) == doctest::Approx(0.04 + 2.0));
}

TEST_CASE("update: spurious out-of-range measurement is dropped") {
  const ObjectBelief prior = one_object(5.0, 5.0, 25.0);
  Measurement m;
  m.object_id = 0;
  m.value = {50.0, 50.0};  // far outside range of the pose below
  m.sensor_pose = {5.0, 5.0, 0.0};
  const ObjectBelief post = update(prior, {m}, {10.0, 1.0});
  CHECK(post.info[0] == prior.info[0]);
}

TEST_CASE("update order invariance") {
  Rng rng(11);
  const ObjectBelief prior = one_object(5.0, 5.0, 25.0);
  Measurement a, b;
  a.object_id = b.object_id = 0;
  a.value = {5.0 + rng.normal(), 5.0 + rng.normal()};
  b.value = {5.0 + rng.normal(), 5.0 + rng.normal()};
  a.sensor_pose = b.sensor_pose = {5.0, 5.0, 0.0};
  const SensorParams sensor{10.0, 1.0};
  const ObjectBelief ab = update(prior, {a, b}, sensor);
  const ObjectBelief ba = update(update(prior, {b}, sensor), {a}, sensor);
  CHECK(ab.mean[0].x() == doctest::Approx(ba.mean[0].x()).epsilon(1e-9));
  CHECK(ab.mean[0].y() == doctest::Approx(ba.mean[0].y()).epsilon(1e-9));
  CHECK((ab.info[0] - ba.info[0]).norm() < 1e-9);
}

TEST_CASE("update matches the covariance-form Kalman oracle") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const double variance = rng.uniform(1.0, 30.0);
    const Eigen::Vector2d truth(rng.uniform(2.0, 8.0), rng.uniform(2.0, 8.0));
    ObjectBelief belief = one_object(truth.x(), truth.y(), variance);
    oracle::Gaussian2 ref{belief.mean[0], belief.covariance(0)};

    const SensorParams sensor{10.0, rng.uniform(0.5, 2.0)};
    std::vector<Eigen::Vector2d> values;
    const int k = 20;
    for (int i = 0; i < k; ++i) {
      Measurement m;
      m.object_id = 0;
      m.value = truth + Eigen::Vector2d(rng.normal(), rng.normal());
      m.sensor_pose = {truth.x(), truth.y(), 0.0};
      values.push_back(m.value);
      belief = update(belief, {m}, sensor);  // sequential information form
    }
    ref = oracle::kalman_sequence(ref, values, sensor.noise_var);
    const oracle::Gaussian2 batch =
        oracle::batch_posterior({one_object(truth.x(), truth.y(), variance).mean[0],
                                 Eigen::Matrix2d::Identity() * variance},
                                values, sensor.noise_var);

    CHECK((belief.mean[0] - ref.mean).norm() / ref.mean.norm() < 1e-9);
    CHECK((belief.covariance(0) - ref.cov).norm() / ref.cov.norm() < 1e-9);
    CHECK((belief.mean[0] - batch.mean).norm() / batch.mean.norm() < 1e-9);
    CHECK((belief.covariance(0) - batch.cov).norm() / batch.cov.norm() < 1e-9);
  }
}

TEST_CASE("predict_information: out-of-range trajectories change nothing") {
  const ObjectBelief prior = one_object(50.0, 50.0, 25.0);
  const Trajectory traj{{0, 0, 0}, {2, 0, 0}, {4, 0, 0}};
  const ObjectBelief pred = predict_information(prior, {traj}, {10.0, 1.0});
  CHECK(pred.info[0] == prior.info[0]);
  CHECK(pred.mean[0] == prior.mean[0]);
}

TEST_CASE("predict_information: k in-range steps add k innovations") {
  const ObjectBelief prior = one_object(0.0, 0.0, 25.0);
  // traj[0] is excluded; three subsequent poses are in range.
  const Trajectory traj{{1, 0, 0}, {2, 0, 0}, {3, 0, 0}, {4, 0, 0}};
  const ObjectBelief pred = predict_information(prior, {traj}, {10.0, 1.0});
  CHECK(pred.info[0](0, 0) == doctest::Approx(0.04 + 3.0));
  CHECK(pred.mean[0] == prior.mean[0]);
}

TEST_CASE("predict_information: disjoint coverage updates objects independently") {
  ObjectBelief prior =
      ObjectBelief::isotropic({{0.0, 0.0}, {100.0, 0.0}}, 25.0);
  const Trajectory near_first{{0, 1, 0}, {1, 1, 0}};
  const Trajectory near_second{{100, 1, 0}, {99, 1, 0}};
  const ObjectBelief pred =
      predict_information(prior, {near_first, near_second}, {10.0, 1.0});
  CHECK(pred.info[0](0, 0) == doctest::Approx(0.04 + 1.0));
  CHECK(pred.info[1](0, 0) == doctest::Approx(0.04 + 1.0));
}

TEST_CASE("predict_information never changes any mean and gain is monotone") {
  Rng rng(5);
  ObjectBelief belief = ObjectBelief::isotropic(
      {{10.0, 10.0}, {30.0, 10.0}, {20.0, 25.0}}, 25.0);
  const SensorParams sensor{10.0, 1.0};
  double prev_gain = 0.0;
  Trajectory traj{{10.0, 5.0, 0.0}};
  for (int extend = 0; extend < 6; ++extend) {
    traj.push_back({10.0, 5.0 + extend, 0.0});
    const ObjectBelief pred = predict_information(belief, {traj}, sensor);
    for (int i = 0; i < belief.size(); ++i) CHECK(pred.mean[i] == belief.mean[i]);
    const double gain = information_gain(belief, pred);
    CHECK(gain >= prev_gain);
    prev_gain = gain;
  }
}

TEST_CASE("sample_objects: vanishing variance collapses to the mean") {
  Rng rng(6);
  const ObjectBelief belief = one_object(3.0, -2.0, 1e-16);
  for (const auto& set : sample_objects(belief, 10, rng)) {
    CHECK(set[0].x() == doctest::Approx(3.0).epsilon(1e-6));
    CHECK(set[0].y() == doctest::Approx(-2.0).epsilon(1e-6));
  }
}

TEST_CASE("sample_objects: empirical moments match the belief") {
  Rng rng(7);
  const double variance = 4.0;
  const ObjectBelief belief = one_object(1.0, 2.0, variance);
  const int n = 100000;
  const auto sets = sample_objects(belief, n, rng);
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (const auto& s : sets) mean += s[0];
  mean /= n;
  const double se = 3.0 * std::sqrt(variance / n);
  CHECK(std::abs(mean.x() - 1.0) < se);
  CHECK(std::abs(mean.y() - 2.0) < se);

  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (const auto& s : sets) cov += (s[0] - mean) * (s[0] - mean).transpose();
  cov /= n;
  CHECK(std::abs(cov(0, 0) - variance) / variance < 0.05);
  CHECK(std::abs(cov(1, 1) - variance) / variance < 0.05);
}

TEST_CASE("information_gain: zero for identical beliefs, log(26) worked value") {
  const ObjectBelief prior = one_object(0.0, 0.0, 25.0);
  CHECK(information_gain(prior, prior) == doctest::Approx(0.0));

  ObjectBelief pred = prior;
  pred.info[0] = Eigen::Matrix2d::Identity() * 1.04;
  CHECK(information_gain(prior, pred) == doctest::Approx(std::log(26.0)).epsilon(1e-9));
}

TEST_CASE("information_gain is additive over independent objects") {
  ObjectBelief prior = ObjectBelief::isotropic({{0, 0}, {10, 10}}, 25.0);
  ObjectBelief pred = prior;
  pred.info[0] += Eigen::Matrix2d::Identity();
  pred.info[1] += 2.0 * Eigen::Matrix2d::Identity();

  ObjectBelief p0 = one_object(0, 0, 25.0), q0 = p0;
  q0.info[0] += Eigen::Matrix2d::Identity();
  ObjectBelief p1 = one_object(10, 10, 25.0), q1 = p1;
  q1.info[0] += 2.0 * Eigen::Matrix2d::Identity();
  CHECK(information_gain(prior, pred) ==
        doctest::Approx(information_gain(p0, q0) + information_gain(p1, q1)));
}

TEST_CASE("information_gain equals the entropy-difference oracle on random SPD cases") {
  Rng rng(8);
  for (int c = 0; c < 100; ++c) {
    // Random SPD prior information via A A^T + eps I.
    Eigen::Matrix2d a;
    a << rng.normal(), rng.normal(), rng.normal(), rng.normal();
    const Eigen::Matrix2d info = a * a.transpose() + 0.05 * Eigen::Matrix2d::Identity();
    ObjectBelief prior = one_object(0, 0, 1.0);
    prior.info[0] = info;
    ObjectBelief pred = prior;
    const int k = 1 + static_cast<int>(rng.uniform() * 5);
    pred.info[0] += k * Eigen::Matrix2d::Identity();

    const double gain = information_gain(prior, pred);
    const double ref = oracle::gaussian_entropy(prior.covariance(0)) -
                       oracle::gaussian_entropy(pred.covariance(0));
    CHECK(gain == doctest::Approx(ref).epsilon(1e-9));
    CHECK(gain >= 0.0);
  }
}
