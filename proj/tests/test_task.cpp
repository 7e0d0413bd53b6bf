#include <cmath>

#include "doctest.h"
#include "escort/task.hpp"
#include "oracles.hpp"

using namespace escort;

namespace {

ReachAvoidTask default_task() {
  ReachAvoidTask t;
  t.goal = {90.0, 50.0};
  return t;
}

}  // namespace

TEST_CASE("avoid_factor worked values") {
  ReachAvoidTask t = default_task();
  CHECK(avoid_factor({5, 5, 0}, {5.0, 5.0}, t) == doctest::Approx(0.1));
  CHECK(avoid_factor({5, 5, 0}, {5000.0, 5.0}, t) == doctest::Approx(1.0));
  const double half_peak = t.r_o * std::sqrt(2.0 * std::log(2.0));
  CHECK(avoid_factor({0, 0, 0}, {half_peak, 0.0}, t) == doctest::Approx(0.55));
}

TEST_CASE("reach_factor worked values") {
  ReachAvoidTask t = default_task();
  CHECK(reach_factor({90, 50, 0}, t) == doctest::Approx(1.0));
  CHECK(reach_factor({90 + t.r_d, 50, 0}, t) == doctest::Approx(std::exp(-0.5)));
  CHECK(reach_factor({90 + 1000, 50, 0}, t) == doctest::Approx(0.0));
}

TEST_CASE("satisfaction_given_objects: pinned at goal with no objects") {
  ReachAvoidTask t = default_task();
  const Trajectory traj{{90, 50, 0}, {90, 50, 0}, {90, 50, 0}};
  CHECK(satisfaction_given_objects(traj, {}, t) == doctest::Approx(1.0));
}

TEST_CASE("satisfaction_given_objects: annihilating factor at P_O = 1") {
  ReachAvoidTask t = default_task();
  t.p_o = 1.0;
  const Trajectory traj{{90, 50, 0}, {30, 30, 0}};
  CHECK(satisfaction_given_objects(traj, {{30.0, 30.0}}, t) == 0.0);
}

TEST_CASE("satisfaction_given_objects: hand-expanded 2-step product") {
  ReachAvoidTask t = default_task();
  const Trajectory traj{{80, 50, 0}, {85, 52, 0}};
  const Eigen::Vector2d o(83.0, 51.0);
  const double expect = avoid_factor(traj[0], o, t) * avoid_factor(traj[1], o, t) *
                        reach_factor(traj[0], t) * reach_factor(traj[1], t);
  CHECK(satisfaction_given_objects(traj, {o}, t) ==
        doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("marginal_satisfaction: degenerate belief equals the plug-in value") {
  Rng rng(1);
  ReachAvoidTask t = default_task();
  const ObjectBelief belief = ObjectBelief::isotropic({{85.0, 51.0}}, 1e-16);
  const Trajectory traj{{80, 50, 0}, {84, 50, 0}, {88, 50, 0}};
  const double mc = marginal_satisfaction(traj, belief, t, 50, rng);
  const double plug = satisfaction_given_objects(traj, {{85.0, 51.0}}, t);
  CHECK(mc == doctest::Approx(plug).epsilon(1e-6));
}

TEST_CASE("marginal_satisfaction: empty object set is deterministic") {
  Rng rng(2);
  ReachAvoidTask t = default_task();
  const ObjectBelief belief = ObjectBelief::isotropic({}, 25.0);
  const Trajectory traj{{70, 50, 0}, {75, 50, 0}};
  const double expect = reach_factor(traj[0], t) * reach_factor(traj[1], t);
  CHECK(marginal_satisfaction(traj, belief, t, 5, rng) == doctest::Approx(expect));
}

TEST_CASE("marginal_satisfaction matches Gauss-Hermite quadrature") {
  ReachAvoidTask t = default_task();
  const Eigen::Vector2d mean(86.0, 52.0);
  const double variance = 9.0;
  const ObjectBelief belief = ObjectBelief::isotropic({mean}, variance);
  const Trajectory traj{{85.0, 50.0, 0.0}};  // single timestep

  const double ref = oracle::quadrature_satisfaction(
      traj, mean, variance * Eigen::Matrix2d::Identity(), t);

  const int n_mc = 10000;
  Rng rng(3);
  const double mc = marginal_satisfaction(traj, belief, t, n_mc, rng);
  // Bernoulli-style bound on the MC standard error: values lie in [0, 1].
  const double se = 0.5 / std::sqrt(static_cast<double>(n_mc));
  CHECK(std::abs(mc - ref) < 3.0 * se);
}

TEST_CASE("posterior_satisfaction: identical belief gives the marginal value") {
  ReachAvoidTask t = default_task();
  const ObjectBelief belief = ObjectBelief::isotropic({{85.0, 51.0}}, 9.0);
  const Trajectory traj{{80, 50, 0}, {84, 50, 0}};
  Rng a(4), b(4);
  CHECK(posterior_satisfaction(traj, belief, t, 200, a) ==
        marginal_satisfaction(traj, belief, t, 200, b));
}

TEST_CASE("posterior_satisfaction: infinite information collapses to the mean") {
  Rng rng(5);
  ReachAvoidTask t = default_task();
  ObjectBelief belief = ObjectBelief::isotropic({{85.0, 51.0}}, 1.0);
  belief.info[0] = 1e16 * Eigen::Matrix2d::Identity();
  const Trajectory traj{{80, 50, 0}, {84, 50, 0}};
  const double got = posterior_satisfaction(traj, belief, t, 50, rng);
  const double plug = satisfaction_given_objects(traj, {{85.0, 51.0}}, t);
  CHECK(got == doctest::Approx(plug).epsilon(1e-6));
}

TEST_CASE("all satisfaction outputs stay in [0, 1]") {
  Rng rng(6);
  ReachAvoidTask t = default_task();
  for (int trial = 0; trial < 30; ++trial) {
    ObjectSet objects;
    for (int i = 0; i < 5; ++i) {
      objects.push_back({rng.uniform(20.0, 80.0), rng.uniform(20.0, 80.0)});
    }
    Trajectory traj;
    for (int k = 0; k < 6; ++k) {
      traj.push_back({rng.uniform(0.0, 100.0), rng.uniform(0.0, 100.0), 0.0});
    }
    const double p = satisfaction_given_objects(traj, objects, t);
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
    const ObjectBelief belief = ObjectBelief::isotropic(objects, 25.0);
    const double m = marginal_satisfaction(traj, belief, t, 20, rng);
    CHECK(m >= 0.0);
    CHECK(m <= 1.0);
  }
}

TEST_CASE("satisfaction decreases as a trajectory point approaches an object") {
  // Move the point along a circle centered on the goal so the reach factor is
  // constant and only the object distance varies.
  ReachAvoidTask t = default_task();
  const double radius = 40.0;
  const Eigen::Vector2d o(t.goal.x() - radius, t.goal.y());
  double prev = -1.0;
  for (double phi = 0.5; phi <= M_PI + 1e-9; phi += 0.25) {
    const Trajectory traj{{t.goal.x() + radius * std::cos(phi),
                           t.goal.y() + radius * std::sin(phi), 0.0}};
    const double p = satisfaction_given_objects(traj, {o}, t);
    // Tiny slack: the reach factor is constant up to rounding of cos/sin.
    if (prev >= 0.0) CHECK(p <= prev * (1.0 + 1e-12));
    prev = p;
  }
}

TEST_CASE("marginal_satisfaction is deterministic given the seed") {
  ReachAvoidTask t = default_task();
  const ObjectBelief belief = ObjectBelief::isotropic({{60.0, 55.0}}, 25.0);
  const Trajectory traj{{50, 50, 0}, {55, 50, 0}};
  Rng a(77), b(77);
  CHECK(marginal_satisfaction(traj, belief, t, 100, a) ==
        marginal_satisfaction(traj, belief, t, 100, b));
}

TEST_CASE("log-space evaluation only reaches -inf through exact zeros") {
  ReachAvoidTask t = default_task();
  // Far from the goal the probability underflows in linear space but the log
  // stays finite.
  const Trajectory far{{0, 0, 0}, {2, 0, 0}, {4, 0, 0}, {6, 0, 0}};
  const double logp = log_satisfaction_given_objects(far, {}, t);
  CHECK(std::isfinite(logp));
  CHECK(logp < -100.0);

  t.p_o = 1.0;
  const Trajectory hit{{30, 30, 0}};
  CHECK(std::isinf(log_satisfaction_given_objects(hit, {{30.0, 30.0}}, t)));
}
