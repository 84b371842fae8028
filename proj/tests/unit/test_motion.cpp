#include <doctest.h>

#include <cmath>
#include <numeric>

#include "nfbeam/motion.hpp"

using namespace nfbeam;

TEST_CASE("kinematic forecast") {
  const MotionState eta{5, 10, 8, 7};
  const MotionState next = kinematic_forecast(eta, 1e-4);
  CHECK(next.x == doctest::Approx(5.0008).epsilon(1e-15));
  CHECK(next.y == doctest::Approx(10.0007).epsilon(1e-15));
  CHECK(next.vx == 8.0);
  CHECK(next.vy == 7.0);

  CHECK(kinematic_forecast({1, 2, 0, 0}, 0.37) == MotionState{1, 2, 0, 0});

  const MotionState two_halves = kinematic_forecast(kinematic_forecast(eta, 0.5e-4), 0.5e-4);
  CHECK(two_halves.x == doctest::Approx(next.x).epsilon(1e-15));
  CHECK(two_halves.y == doctest::Approx(next.y).epsilon(1e-15));

  SUBCASE("linear and equal to the transition matrix") {
    const double a = -2.5;
    const MotionState scaled = MotionState::from_vector(a * eta.vector());
    const Vec4 lhs = kinematic_forecast(scaled, 0.3).vector();
    const Vec4 rhs = a * kinematic_forecast(eta, 0.3).vector();
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((transition_matrix(0.3) * eta.vector() - kinematic_forecast(eta, 0.3).vector())
              .cwiseAbs()
              .maxCoeff() < 1e-15);
  }

  SUBCASE("k steps of dt equal one step of k dt") {
    MotionState s = eta;
    for (int i = 0; i < 1000; ++i) s = kinematic_forecast(s, 1e-4);
    const MotionState once = kinematic_forecast(eta, 0.1);
    CHECK(s.x == doctest::Approx(once.x).epsilon(1e-13));
    CHECK(s.y == doctest::Approx(once.y).epsilon(1e-13));
  }
}

TEST_CASE("step_motion uses the pre-step velocity for the position") {
  RandomStream rng(3, "trajectory");
  const MotionState eta{5, 10, 8, 7};
  const MotionState next = step_motion(eta, 1e-4, MotionNoise{1.0, 1.0}, rng);
  CHECK(next.x == doctest::Approx(5.0008).epsilon(1e-15));
  CHECK(next.y == doctest::Approx(10.0007).epsilon(1e-15));
  CHECK(next.vx != 8.0);

  RandomStream quiet(3, "trajectory");
  CHECK(step_motion(eta, 1e-4, MotionNoise{0, 0}, quiet) == kinematic_forecast(eta, 1e-4));
}

TEST_CASE("velocity increments have the configured variance and no memory") {
  RandomStream rng(11, "trajectory");
  const MotionNoise noise{0.01, 0.01};
  const int steps = 100000;
  std::vector<double> dvx(steps), dvy(steps);
  MotionState s{5, 10, 8, 7};
  for (int i = 0; i < steps; ++i) {
    const MotionState next = step_motion(s, 1e-4, noise, rng);
    dvx[i] = next.vx - s.vx;
    dvy[i] = next.vy - s.vy;
    s = next;
  }
  for (const auto* series : {&dvx, &dvy}) {
    const double mean = std::accumulate(series->begin(), series->end(), 0.0) / steps;
    double var = 0.0, lag = 0.0;
    for (int i = 0; i < steps; ++i) var += ((*series)[i] - mean) * ((*series)[i] - mean);
    for (int i = 1; i < steps; ++i) lag += ((*series)[i] - mean) * ((*series)[i - 1] - mean);
    var /= steps - 1;
    CHECK(var >= 0.0097);
    CHECK(var <= 0.0103);
    CHECK(std::abs(lag / ((steps - 1) * var)) < 0.02);
  }
}

TEST_CASE("trajectory generation") {
  RandomStream rng(1, "trajectory");
  const MotionState eta0{5, 10, 8, 7};
  const auto one = generate_trajectory(eta0, 1e-4, MotionNoise{}, 1, rng);
  REQUIRE(one.size() == 1);
  CHECK(one[0] == eta0);

  CHECK_THROWS_AS(generate_trajectory(eta0, 1e-4, MotionNoise{}, 0, rng), ConfigError);

  SUBCASE("uniform motion without noise") {
    const auto traj = generate_trajectory(eta0, 1e-4, MotionNoise{0, 0}, 20001, rng);
    CHECK(traj.back().x == doctest::Approx(21.0).epsilon(1e-12));
    CHECK(traj.back().y == doctest::Approx(24.0).epsilon(1e-12));
    for (size_t l = 0; l < traj.size(); l += 997) {
      CHECK(traj[l].x == doctest::Approx(5 + 8 * 1e-4 * l).epsilon(1e-12));
      CHECK(traj[l].y == doctest::Approx(10 + 7 * 1e-4 * l).epsilon(1e-12));
    }
  }

  SUBCASE("noisy trajectories curve") {
    RandomStream r(1, "trajectory");
    const auto traj = generate_trajectory(eta0, 1e-4, MotionNoise{}, 2000, r);
    double lo = 1e9, hi = -1e9;
    for (size_t l = 1; l < traj.size(); ++l) {
      const double dx = traj[l].x - traj[l - 1].x;
      lo = std::min(lo, dx);
      hi = std::max(hi, dx);
    }
    CHECK(hi - lo > 1e-5);
  }

  SUBCASE("same seed, same trajectory") {
    RandomStream a(42, "trajectory"), b(42, "trajectory");
    const auto ta = generate_trajectory(eta0, 1e-4, MotionNoise{}, 500, a);
    const auto tb = generate_trajectory(eta0, 1e-4, MotionNoise{}, 500, b);
    CHECK(ta == tb);
  }
}

TEST_CASE("named random streams are independent of each other") {
  RandomStream traj(5, "trajectory"), echo(5, "echo-noise"), again(5, "trajectory");
  const double a = traj.normal(1.0), b = echo.normal(1.0), c = again.normal(1.0);
  CHECK(a == c);
  CHECK(a != b);
  CHECK(RandomStream::stream_id("trajectory") != RandomStream::stream_id("echo-noise"));

  RandomStream zero(5, "trajectory");
  CHECK(zero.normal(0.0) == 0.0);
  CHECK(zero.complex_normal(0.0) == cdouble(0, 0));
}

TEST_CASE("motion noise covariance") {
  const Mat4 q = MotionNoise{0.02, 0.03}.covariance();
  CHECK(q(2, 2) == 0.02);
  CHECK(q(3, 3) == 0.03);
  CHECK(q.topLeftCorner<2, 2>().isZero(0));
  CHECK_THROWS_AS(MotionNoise({-1, 0}).validate(), ConfigError);
}
