#include <cmath>

#include "doctest.h"
#include "escort/dynamics.hpp"
#include "oracles.hpp"

using namespace escort;

TEST_CASE("step: straight-line motion") {
  const RobotState s = step({0, 0, 0}, 0.0, {2.0, M_PI / 2, 1.0});
  CHECK(s.x == doctest::Approx(2.0));
  CHECK(s.y == doctest::Approx(0.0));
  CHECK(s.theta == doctest::Approx(0.0));
}

TEST_CASE("step: symmetry under rotation") {
  const RobotState s = step({0, 0, M_PI / 2}, 0.0, {2.0, M_PI / 2, 1.0});
  CHECK(s.x == doctest::Approx(0.0));
  CHECK(s.y == doctest::Approx(2.0));
  CHECK(s.theta == doctest::Approx(M_PI / 2));
}

TEST_CASE("step: one explicit-Euler step uses the old heading") {
  const RobotState s = step({0, 0, 0}, 0.5, {2.0, M_PI / 2, 0.1});
  CHECK(s.x == doctest::Approx(0.2));
  CHECK(s.y == doctest::Approx(0.0));
  CHECK(s.theta == doctest::Approx(0.05));
}

TEST_CASE("step clamps the control") {
  const AgentParams p{1.0, 0.5, 1.0};
  const RobotState a = step({0, 0, 0}, 10.0, p);
  const RobotState b = step({0, 0, 0}, 0.5, p);
  CHECK(a.theta == doctest::Approx(b.theta));
}

TEST_CASE("rollout: empty plan returns only the initial state") {
  const Trajectory t = rollout({1, 2, 0.3}, {}, {2.0, M_PI / 2, 1.0});
  REQUIRE(t.size() == 1);
  CHECK(t[0].x == 1.0);
  CHECK(t[0].y == 2.0);
}

TEST_CASE("rollout: zero controls give a straight line spaced v*dt") {
  const AgentParams p{2.0, M_PI / 2, 1.0};
  const Trajectory t = rollout({0, 0, 0}, ControlSequence(5, 0.0), p);
  REQUIRE(t.size() == 6);
  for (int k = 0; k <= 5; ++k) {
    CHECK(t[k].x == doctest::Approx(2.0 * k));
    CHECK(t[k].y == doctest::Approx(0.0));
  }
}

TEST_CASE("rollout: constant turn closing a full circle returns near start") {
  // u*dt*T = 2*pi with small dt; compare against fine-step integration.
  const int steps = 200;
  const AgentParams p{2.0, M_PI, 0.05};
  const double u = 2.0 * M_PI / (steps * p.dt);
  const ControlSequence controls(steps, u);
  const Trajectory t = rollout({0, 0, 0}, controls, p);
  CHECK(std::hypot(t.back().x, t.back().y) < 10.0 * p.dt);

  const RobotState fine = oracle::integrate_fine({0, 0, 0}, controls, p, 200);
  // Euler drifts O(dt) from the true arc per revolution.
  CHECK(std::hypot(t.back().x - fine.x, t.back().y - fine.y) < 0.5);
}

TEST_CASE("rollout is rotationally equivariant") {
  Rng rng(42);
  const AgentParams p{2.0, M_PI / 2, 1.0};
  ControlSequence u(8);
  for (auto& c : u) c = rng.uniform(-1.5, 1.5);
  const double phi = 1.234;
  const Trajectory base = rollout({3, -1, 0.4}, u, p);
  const Trajectory rot =
      rollout({3 * std::cos(phi) + 1 * std::sin(phi),
               3 * std::sin(phi) - 1 * std::cos(phi), wrap_angle(0.4 + phi)},
              u, p);
  for (std::size_t k = 0; k < base.size(); ++k) {
    const double rx = base[k].x * std::cos(phi) - base[k].y * std::sin(phi);
    const double ry = base[k].x * std::sin(phi) + base[k].y * std::cos(phi);
    CHECK(rot[k].x == doctest::Approx(rx).epsilon(1e-12));
    CHECK(rot[k].y == doctest::Approx(ry).epsilon(1e-12));
  }
}

TEST_CASE("rollout satisfies the semigroup property") {
  Rng rng(7);
  const AgentParams p{3.0, M_PI / 2, 0.5};
  ControlSequence a(4), b(6);
  for (auto& c : a) c = rng.uniform(-1.0, 1.0);
  for (auto& c : b) c = rng.uniform(-1.0, 1.0);
  ControlSequence ab = a;
  ab.insert(ab.end(), b.begin(), b.end());
  const Trajectory full = rollout({1, 1, 0.2}, ab, p);
  const Trajectory first = rollout({1, 1, 0.2}, a, p);
  const Trajectory second = rollout(first.back(), b, p);
  CHECK(full.back().x == doctest::Approx(second.back().x).epsilon(1e-14));
  CHECK(full.back().y == doctest::Approx(second.back().y).epsilon(1e-14));
  CHECK(full.back().theta == doctest::Approx(second.back().theta).epsilon(1e-14));
}

TEST_CASE("heading stays in (-pi, pi] along any rollout") {
  Rng rng(99);
  const AgentParams p{2.0, M_PI / 2, 1.0};
  for (int trial = 0; trial < 20; ++trial) {
    ControlSequence u(15);
    for (auto& c : u) c = rng.uniform(-2.0, 2.0);
    for (const auto& s : rollout({0, 0, rng.uniform(-3.0, 3.0)}, u, p)) {
      CHECK(s.theta > -M_PI);
      CHECK(s.theta <= M_PI);
    }
  }
}

TEST_CASE("wrap_angle maps -pi to pi") {
  CHECK(wrap_angle(-M_PI) == doctest::Approx(M_PI));
  CHECK(wrap_angle(3.0 * M_PI) == doctest::Approx(M_PI));
  CHECK(wrap_angle(0.1) == doctest::Approx(0.1));
}
