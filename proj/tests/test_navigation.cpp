#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "sgnav/navigation.hpp"
#include "sgnav/rng.hpp"

using namespace sgnav;

namespace {

constexpr double kPi = std::numbers::pi;

struct Pose {
  double x = 0.0, y = 0.0, th = 0.0;
};

// Fixed-step RK4 on the car kinematics th' = u_s tan(u_phi)/W, x' = u_s cos th,
// y' = u_s sin th — the independent oracle for the closed-form arc.
Pose rk4(const RobotState& s0, const Control& c, double t, double wheelbase,
         int steps = 2000) {
  const double rate = c.u_s * std::tan(c.u_phi) / wheelbase;
  auto deriv = [&](const Pose& p) {
    return Pose{c.u_s * std::cos(p.th), c.u_s * std::sin(p.th), rate};
  };
  auto advance = [](const Pose& p, const Pose& d, double h) {
    return Pose{p.x + h * d.x, p.y + h * d.y, p.th + h * d.th};
  };
  Pose p{s0.pos.x, s0.pos.y, s0.phi};
  const double h = t / steps;
  for (int i = 0; i < steps; ++i) {
    const Pose k1 = deriv(p);
    const Pose k2 = deriv(advance(p, k1, h / 2));
    const Pose k3 = deriv(advance(p, k2, h / 2));
    const Pose k4 = deriv(advance(p, k3, h));
    p.x += h / 6 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x);
    p.y += h / 6 * (k1.y + 2 * k2.y + 2 * k3.y + k4.y);
    p.th += h / 6 * (k1.th + 2 * k2.th + 2 * k3.th + k4.th);
  }
  return p;
}

ObstacleDisc static_disc(Vec2 at, double radius) {
  ObstacleDisc disc;
  disc.entity_id = 1;
  disc.radius = radius;
  disc.start = at;
  disc.positions.fill(at);
  return disc;
}

Scenario corridor_scenario() {
  Scenario sc;
  sc.scene.dt = 0.4;
  sc.robot.goal = {8.0, 0.0};
  sc.start = {{0.0, 0.0}, 0.0};
  sc.predictor.kind = PredictorKind::kLinear;
  return sc;
}

}  // namespace

TEST_CASE("angles normalize into (-pi, pi]") {
  CHECK(normalize_angle(0.0) == 0.0);
  CHECK(normalize_angle(kPi) == doctest::Approx(kPi));
  CHECK(normalize_angle(-kPi) == doctest::Approx(kPi));
  CHECK(normalize_angle(3.0 * kPi) == doctest::Approx(kPi));
  CHECK(normalize_angle(2.0 * kPi) == doctest::Approx(0.0).scale(1.0));
  CHECK(normalize_angle(-0.1) == doctest::Approx(-0.1));
  CHECK(normalize_angle(7.0) == doctest::Approx(7.0 - 2.0 * kPi));
  for (double a = -20.0; a <= 20.0; a += 0.37) {
    const double n = normalize_angle(a);
    CHECK(n > -kPi);
    CHECK(n <= kPi);
    CHECK(std::remainder(n - a, 2.0 * kPi) == doctest::Approx(0.0).scale(1.0));
  }
}

TEST_CASE("the closed-form arc matches RK4 integration of the kinematics") {
  Rng rng(55);
  for (int trial = 0; trial < 400; ++trial) {
    const RobotState start{{rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0)},
                           rng.uniform(-kPi, kPi)};
    const Control c{rng.uniform(0.0, 1.5), rng.uniform(-0.6, 0.6)};
    const double wheelbase = rng.uniform(0.5, 2.0);
    const double t = rng.uniform(0.0, 5.0);

    const RobotState got = propagate(start, c, t, wheelbase);
    const Pose want = rk4(start, c, t, wheelbase);
    CHECK(std::abs(got.pos.x - want.x) <= 1e-6);
    CHECK(std::abs(got.pos.y - want.y) <= 1e-6);
    CHECK(std::abs(std::remainder(got.phi - want.th, 2.0 * kPi)) <= 1e-6);
  }

  SUBCASE("near-straight controls hit the series branch") {
    for (int trial = 0; trial < 400; ++trial) {
      const RobotState start{{rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0)},
                             rng.uniform(-kPi, kPi)};
      const Control c{rng.uniform(0.0, 1.5), rng.uniform(-1e-4, 1e-4)};
      const double t = rng.uniform(0.0, 5.0);
      const RobotState got = propagate(start, c, t, 1.0);
      const Pose want = rk4(start, c, t, 1.0);
      CHECK(std::abs(got.pos.x - want.x) <= 1e-9);
      CHECK(std::abs(got.pos.y - want.y) <= 1e-9);
    }
  }
}

TEST_CASE("arc branches agree at the switchover") {
  // Just above the threshold takes the closed form, just below the series;
  // the two must describe the same arc.
  for (const double u_s : {0.3, 1.0, 1.5}) {
    for (const double t : {0.5, 2.0, 5.0}) {
      for (const double sign : {1.0, -1.0}) {
        const Vec2 closed = propagate_body({u_s, sign * 1.0000001e-4}, t, 1.0);
        const Vec2 series = propagate_body({u_s, sign * 0.9999999e-4}, t, 1.0);
        CHECK(std::abs(closed.x - series.x) <= 1e-8);
        CHECK(std::abs(closed.y - series.y) <= 1e-8);
      }
    }
  }
}

TEST_CASE("arc landmarks: straight line, quarter circle, arc-length bound") {
  SUBCASE("zero steering is an exact straight line") {
    const Vec2 r = propagate_body({1.25, 0.0}, 2.0, 1.0);
    CHECK(r.x == 2.5);
    CHECK(r.y == 0.0);
  }
  SUBCASE("unit-radius quarter arc lands at (1, 1)") {
    const Vec2 r = propagate_body({1.0, kPi / 4.0}, kPi / 2.0, 1.0);
    CHECK(r.x == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.y == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("no arc overshoots its own length") {
    Rng rng(56);
    for (int trial = 0; trial < 2000; ++trial) {
      const Control c{rng.uniform(0.0, 1.5), rng.uniform(-0.6, 0.6)};
      const double t = rng.uniform(0.0, 5.0);
      const Vec2 r = propagate_body(c, t, 1.0);
      CHECK(r.norm() <= c.u_s * t + 1e-12);
    }
  }
  SUBCASE("world-frame placement rotates the body arc") {
    const RobotState north{{2.0, 1.0}, kPi / 2.0};
    const RobotState got = propagate(north, {1.0, 0.0}, 2.0, 1.0);
    CHECK(got.pos.x == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(got.pos.y == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(got.phi == doctest::Approx(kPi / 2.0));
  }
}

TEST_CASE("forecast discs interpolate and then hold") {
  ObstacleDisc disc;
  disc.start = {0.0, 0.0};
  for (int k = 0; k < kPredictedSteps; ++k)
    disc.positions[k] = {1.0 * (k + 1), 0.0};
  const double dt = 0.4;

  CHECK(forecast_position(disc, 0.0, dt).x == 0.0);
  CHECK(forecast_position(disc, -1.0, dt).x == 0.0);
  CHECK(forecast_position(disc, 0.2, dt).x == doctest::Approx(0.5));
  CHECK(forecast_position(disc, 0.4, dt).x == doctest::Approx(1.0));
  CHECK(forecast_position(disc, 0.6, dt).x == doctest::Approx(1.5));
  CHECK(forecast_position(disc, 2.0, dt).x == doctest::Approx(5.0));
  CHECK(forecast_position(disc, 9.0, dt).x == doctest::Approx(5.0));  // held
}

TEST_CASE("forecasts wrap each entity in a disc that covers its members") {
  EntityWindow loner;
  loner.entity_id = 4;
  loner.observed.fill({1.0, 2.0});
  loner.member_offsets[4] = {0.0, 0.0};

  EntityWindow trio;
  trio.entity_id = 1;
  trio.observed.fill({5.0, 5.0});
  trio.member_offsets[1] = {0.0, 0.6};
  trio.member_offsets[2] = {0.0, 0.0};
  trio.member_offsets[3] = {0.0, -0.6};

  PredictionHorizon h;
  for (int k = 0; k < kPredictedSteps; ++k) h.points[k] = {5.0 + 0.1 * k, 5.0};

  const ObstacleForecast forecast = make_forecast({loner, trio}, {h, h}, 0.4, 0.3);
  REQUIRE(forecast.discs.size() == 2);
  CHECK(forecast.discs[0].radius == doctest::Approx(0.3));
  CHECK(forecast.discs[0].start.x == 1.0);
  CHECK(forecast.discs[1].radius == doctest::Approx(0.9));  // widest member + r_p
  CHECK(forecast.discs[1].start.x == 5.0);
  CHECK(forecast.discs[1].positions[2].x == doctest::Approx(5.2));

  CHECK_THROWS_AS(make_forecast({loner}, {h, h}, 0.4, 0.3), std::invalid_argument);
}

TEST_CASE("control selection: free space, detours, and the stop fallback") {
  RobotConfig cfg;
  cfg.goal = {8.0, 0.0};
  const RobotState state{{0.0, 0.0}, 0.0};
  const double horizon = 2.0;

  SUBCASE("goal straight ahead, nothing in the way") {
    const SelectedControl sel = select_control(state, cfg, {}, horizon);
    CHECK_FALSE(sel.fallback_stop);
    CHECK(sel.control.u_phi == 0.0);
    CHECK(sel.control.u_s == doctest::Approx(cfg.max_speed));
    CHECK(sel.cost == doctest::Approx(8.0 - cfg.max_speed * horizon));
  }
  SUBCASE("a static disc on the straight path forces a clean detour") {
    ObstacleForecast forecast;
    forecast.discs.push_back(static_disc({2.0, 0.0}, 0.3));
    const SelectedControl sel = select_control(state, cfg, forecast, horizon);
    CHECK_FALSE(sel.fallback_stop);
    CHECK(sel.cost < 8.0);  // beats stopping in place
    // The audit of the selected arc, with the planner's own geometry.
    CHECK(arc_clearance(state, sel.control, horizon, cfg, forecast) >= 0.0);
    const bool detours = sel.control.u_phi != 0.0 || sel.control.u_s < cfg.max_speed;
    CHECK(detours);
  }
  SUBCASE("enclosed on all sides, the only answer is to stop") {
    ObstacleForecast forecast;
    forecast.discs.push_back(static_disc({0.0, 0.0}, 2.0));
    const SelectedControl sel = select_control(state, cfg, forecast, horizon);
    CHECK(sel.fallback_stop);
    CHECK(sel.control.u_s == 0.0);
    CHECK(sel.control.u_phi == 0.0);
  }
  SUBCASE("selected controls always clear random obstacle fields") {
    Rng rng(57);
    for (int trial = 0; trial < 60; ++trial) {
      ObstacleForecast forecast;
      const int discs = 1 + static_cast<int>(rng.uniform(0.0, 4.0));
      for (int d = 0; d < discs; ++d) {
        ObstacleDisc disc;
        disc.entity_id = d + 1;
        disc.radius = rng.uniform(0.2, 0.8);
        disc.start = {rng.uniform(-1.0, 4.0), rng.uniform(-2.0, 2.0)};
        Vec2 vel{rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3)};
        for (int k = 0; k < kPredictedSteps; ++k)
          disc.positions[k] = disc.start + vel * (k + 1.0);
        forecast.discs.push_back(disc);
      }
      const SelectedControl sel = select_control(state, cfg, forecast, horizon);
      if (!sel.fallback_stop)
        CHECK(arc_clearance(state, sel.control, horizon, cfg, forecast) >= 0.0);
    }
  }
  SUBCASE("lattice parameters are validated") {
    cfg.steering_samples = 20;  // must be odd
    CHECK_THROWS_AS(select_control(state, cfg, {}, horizon), std::invalid_argument);
    cfg = RobotConfig{};
    cfg.max_steering = kPi / 2.0;
    CHECK_THROWS_AS(select_control(state, cfg, {}, horizon), std::invalid_argument);
  }
}

TEST_CASE("arc clearance reports the worst audited margin") {
  RobotConfig cfg;
  const RobotState state{{0.0, 0.0}, 0.0};
  ObstacleForecast forecast;
  forecast.discs.push_back(static_disc({0.5, 0.0}, 0.1));

  // Driving straight through the disc centre: the sample at tau = 0.5 puts the
  // robot exactly on it, so the margin bottoms out at -(r_robot + r_disc).
  CHECK(arc_clearance(state, {1.0, 0.0}, 1.0, cfg, forecast) ==
        doctest::Approx(-0.5).epsilon(1e-12));

  // A parallel lane two meters out keeps a static margin.
  const RobotState offset{{0.0, 2.0}, 0.0};
  const double clearance = arc_clearance(offset, {1.0, 0.0}, 1.0, cfg, forecast);
  CHECK(clearance == doctest::Approx(std::hypot(0.5 - 0.5, 2.0) - 0.5).epsilon(1e-9));
}

TEST_CASE("an empty walkway is crossed almost straight") {
  Scenario sc = corridor_scenario();
  const SimResult result = simulate(sc);

  CHECK(result.outcome == SimOutcome::kGoalReached);
  CHECK(to_string(result.outcome) == "goal_reached");
  CHECK(distance(result.final_state.pos, sc.robot.goal) <= 2.0 * sc.robot.radius);
  // Not shorter than the straight line minus the goal tolerance, and within
  // 5% of the straight line overall.
  CHECK(result.path_length >= 8.0 - 2.0 * sc.robot.radius - 1e-9);
  CHECK(result.path_length <= 8.0 * 1.05);
  for (const TraceStep& step : result.trace) CHECK_FALSE(step.fallback_stop);
  REQUIRE_FALSE(result.events.empty());
  CHECK(result.events.back().find("goal reached") != std::string::npos);
}

TEST_CASE("a crossing pedestrian is passed without contact") {
  Scenario sc = corridor_scenario();
  // Walks south through the corridor ahead of the robot, 0.1 m per step,
  // scripted long enough to cover the whole run.
  for (int t = 0; t < 60; ++t)
    testutil::add_sample(sc.scene, 1, t, 4.0, 1.5 - 0.1 * t);
  testutil::finalize(sc.scene);

  const SimResult result = simulate(sc);
  CHECK(result.outcome == SimOutcome::kGoalReached);
  const double r_sum = sc.robot.radius + sc.robot.personal_radius;
  for (const TraceStep& step : result.trace) CHECK(step.min_clearance >= r_sum - 1e-9);
  for (const std::string& event : result.events)
    CHECK(event.find("collision") == std::string::npos);

  SUBCASE("the run is deterministic") {
    const SimResult again = simulate(sc);
    REQUIRE(again.trace.size() == result.trace.size());
    for (std::size_t i = 0; i < result.trace.size(); ++i) {
      CHECK(again.trace[i].state.pos.x == result.trace[i].state.pos.x);
      CHECK(again.trace[i].state.pos.y == result.trace[i].state.pos.y);
      CHECK(again.trace[i].control.u_s == result.trace[i].control.u_s);
      CHECK(again.trace[i].control.u_phi == result.trace[i].control.u_phi);
      CHECK(again.trace[i].min_clearance == result.trace[i].min_clearance);
    }
    CHECK(again.path_length == result.path_length);
  }
}

TEST_CASE("a pedestrian parked on the robot is a collision, loudly") {
  Scenario sc = corridor_scenario();
  for (int t = 0; t < 12; ++t) testutil::add_sample(sc.scene, 7, t, 0.0, 0.0);
  testutil::finalize(sc.scene);

  const SimResult result = simulate(sc);
  CHECK(result.outcome == SimOutcome::kCollision);
  REQUIRE(result.trace.size() == 1);
  CHECK(result.trace[0].fallback_stop);
  CHECK(result.path_length == 0.0);
  bool logged = false;
  for (const std::string& event : result.events)
    if (event.find("collision with pedestrian 7") != std::string::npos) logged = true;
  CHECK(logged);
}

TEST_CASE("the step cap halts an unreachable goal") {
  Scenario sc = corridor_scenario();
  sc.robot.goal = {1000.0, 0.0};
  sc.max_steps = 5;
  const SimResult result = simulate(sc);
  CHECK(result.outcome == SimOutcome::kStepCap);
  CHECK(result.trace.size() == 5);
  CHECK(result.events.back().find("step cap") != std::string::npos);
}

TEST_CASE("group predictions put one disc around the whole formation") {
  Scenario sc = corridor_scenario();
  // Three abreast walking along x = 12..? — far from the corridor, so the
  // run is easy; what matters is that the planner sees one 3-member disc.
  for (int t = 0; t < 40; ++t)
    for (int p = 0; p < 3; ++p)
      testutil::add_sample(sc.scene, p + 1, t, 12.0 + 0.1 * t, 5.0 + 0.6 * (p - 1));
  testutil::finalize(sc.scene);

  sc.predictor.kind = PredictorKind::kSocialGroupLstm;
  sc.predictor.embedding_dim = 8;
  sc.predictor.hidden_dim = 8;
  sc.params = init_parameters(sc.predictor, 2);

  const SimResult result = simulate(sc);
  CHECK(result.outcome == SimOutcome::kGoalReached);
  REQUIRE_FALSE(result.forecasts.empty());
  for (std::size_t k = 0; k < result.forecasts.size(); ++k) {
    if (result.forecasts[k].discs.empty()) continue;  // scripted steps ran out
    REQUIRE(result.forecasts[k].discs.size() == 1);
    const ObstacleDisc& disc = result.forecasts[k].discs[0];
    CHECK(disc.entity_id == 1);
    CHECK(disc.radius == doctest::Approx(0.6 + sc.robot.personal_radius));
  }
}

TEST_CASE("scenario validation rejects broken setups before stepping") {
  Scenario sc = corridor_scenario();

  SUBCASE("nonpositive step cap") {
    sc.max_steps = 0;
    CHECK_THROWS_AS(simulate(sc), std::invalid_argument);
  }
  SUBCASE("too few scripted steps to ever plan") {
    for (int t = 0; t < 4; ++t) testutil::add_sample(sc.scene, 1, t, 5.0, 5.0);
    testutil::finalize(sc.scene);
    CHECK_THROWS_AS(simulate(sc), std::invalid_argument);
  }
  SUBCASE("learned predictor without parameters") {
    sc.predictor.kind = PredictorKind::kVanillaLstm;
    CHECK_THROWS_AS(simulate(sc), std::invalid_argument);
  }
}
