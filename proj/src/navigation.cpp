#include "sgnav/navigation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "sgnav/predictors.hpp"
#include "sgnav/windows.hpp"

namespace sgnav {

namespace {

constexpr double kSteeringBranch = 1e-4;  // |u_phi| below this uses the series arc

Vec2 lerp(Vec2 a, Vec2 b, double t) { return a + (b - a) * t; }

}  // namespace

void RobotConfig::validate() const {
  if (!(radius > 0.0)) throw std::invalid_argument("robot radius must be positive");
  if (!(max_speed > 0.0)) throw std::invalid_argument("max speed must be positive");
  if (!(max_steering > 0.0) || max_steering >= std::numbers::pi / 2)
    throw std::invalid_argument("max steering must lie in (0, pi/2)");
  if (!(wheelbase > 0.0)) throw std::invalid_argument("wheelbase must be positive");
  if (speed_samples < 2) throw std::invalid_argument("need at least 2 speed samples");
  if (steering_samples < 3 || steering_samples % 2 == 0)
    throw std::invalid_argument("steering samples must be odd and at least 3");
  if (steering_cost < 0.0) throw std::invalid_argument("steering cost must be nonnegative");
  if (!(personal_radius > 0.0))
    throw std::invalid_argument("personal radius must be positive");
}

double normalize_angle(double a) {
  a = std::fmod(a + std::numbers::pi, 2.0 * std::numbers::pi);
  if (a <= 0.0) a += 2.0 * std::numbers::pi;
  return a - std::numbers::pi;
}

Vec2 propagate_body(const Control& c, double t, double wheelbase) {
  const double arc = c.u_s * t;  // distance along the path
  const double tan_phi = std::tan(c.u_phi);
  if (std::abs(c.u_phi) < kSteeringBranch) {
    // Series in a = arc * k around a = 0; enough terms that this branch and
    // the closed form agree to ~1e-8 at the switchover.
    const double k = tan_phi / wheelbase;
    const double a = arc * k;
    const double a2 = a * a;
    const double x = arc * (1.0 - a2 / 6.0 + a2 * a2 / 120.0);
    const double y = arc * (a / 2.0) * (1.0 - a2 / 12.0 + a2 * a2 / 360.0);
    return {x, y};
  }
  const double k = tan_phi / wheelbase;
  const double a = arc * k;
  // 1 - cos(a) written as 2 sin^2(a/2) to avoid cancellation for small a.
  const double half = std::sin(a / 2.0);
  return {std::sin(a) / k, 2.0 * half * half / k};
}

double propagate_heading(const Control& c, double t, double wheelbase) {
  return c.u_s * std::tan(c.u_phi) / wheelbase * t;
}

RobotState propagate(const RobotState& state, const Control& c, double t, double wheelbase) {
  const Vec2 body = propagate_body(c, t, wheelbase);
  RobotState next;
  next.pos = state.pos + body.rotated(state.phi);
  next.phi = normalize_angle(state.phi + propagate_heading(c, t, wheelbase));
  return next;
}

Vec2 forecast_position(const ObstacleDisc& disc, double t, double dt) {
  if (t <= 0.0) return disc.start;
  const double u = t / dt;
  if (u >= kPredictedSteps) return disc.positions[kPredictedSteps - 1];
  const int i = static_cast<int>(u);
  const double frac = u - i;
  const Vec2 a = i == 0 ? disc.start : disc.positions[i - 1];
  const Vec2 b = disc.positions[i];
  return lerp(a, b, frac);
}

ObstacleForecast make_forecast(const std::vector<EntityWindow>& windows,
                               const std::vector<PredictionHorizon>& horizons, double dt,
                               double personal_radius) {
  if (windows.size() != horizons.size())
    throw std::invalid_argument("windows/horizons size mismatch");
  ObstacleForecast forecast;
  forecast.dt = dt;
  forecast.discs.reserve(windows.size());
  for (std::size_t i = 0; i < windows.size(); ++i) {
    ObstacleDisc disc;
    disc.entity_id = windows[i].entity_id;
    double spread = 0.0;
    for (const auto& [ped, offset] : windows[i].member_offsets)
      spread = std::max(spread, offset.norm());
    disc.radius = spread + personal_radius;
    disc.start = windows[i].observed[kObservedSteps - 1];
    disc.positions = horizons[i].points;
    forecast.discs.push_back(disc);
  }
  return forecast;
}

SelectedControl select_control(const RobotState& state, const RobotConfig& cfg,
                               const ObstacleForecast& forecast, double horizon_seconds) {
  cfg.validate();
  SelectedControl best;
  best.control = {0.0, 0.0};
  best.fallback_stop = true;
  best.cost = std::numeric_limits<double>::infinity();

  for (int si = 0; si < cfg.speed_samples; ++si) {
    const double u_s = cfg.max_speed * si / (cfg.speed_samples - 1);
    for (int ai = 0; ai < cfg.steering_samples; ++ai) {
      const double u_phi =
          -cfg.max_steering + 2.0 * cfg.max_steering * ai / (cfg.steering_samples - 1);
      const Control c{u_s, u_phi};

      bool safe = true;
      for (int j = 1; safe && j <= kClearanceSubsamples; ++j) {
        const double tau = horizon_seconds * j / kClearanceSubsamples;
        const Vec2 robot_pos = propagate(state, c, tau, cfg.wheelbase).pos;
        for (const ObstacleDisc& disc : forecast.discs) {
          if (distance(robot_pos, forecast_position(disc, tau, forecast.dt)) <
              cfg.radius + disc.radius) {
            safe = false;
            break;
          }
        }
      }
      if (!safe) continue;

      const Vec2 end = propagate(state, c, horizon_seconds, cfg.wheelbase).pos;
      const double cost = distance(end, cfg.goal) + cfg.steering_cost * std::abs(u_phi);
      if (cost < best.cost) {
        best.control = c;
        best.cost = cost;
        best.fallback_stop = false;
      }
    }
  }
  return best;
}

double arc_clearance(const RobotState& state, const Control& c, double duration,
                     const RobotConfig& cfg, const ObstacleForecast& forecast) {
  double clearance = std::numeric_limits<double>::infinity();
  for (int j = 1; j <= kClearanceSubsamples; ++j) {
    const double tau = duration * j / kClearanceSubsamples;
    const Vec2 robot_pos = propagate(state, c, tau, cfg.wheelbase).pos;
    for (const ObstacleDisc& disc : forecast.discs) {
      const double margin = distance(robot_pos, forecast_position(disc, tau, forecast.dt)) -
                            cfg.radius - disc.radius;
      clearance = std::min(clearance, margin);
    }
  }
  return clearance;
}

void Scenario::validate() const {
  scene.validate();
  robot.validate();
  predictor.validate();
  grouping.validate();
  if (max_steps < 1) throw std::invalid_argument("max_steps must be positive");
  if (!scene.tracks.empty() && num_steps(scene, 1) < kObservedSteps)
    throw std::invalid_argument("scenario must script at least 5 steps of observations");
  if (predictor.kind != PredictorKind::kLinear && params.tensors.empty())
    throw std::invalid_argument("learned predictor requires model parameters");
}

std::string to_string(SimOutcome outcome) {
  switch (outcome) {
    case SimOutcome::kGoalReached: return "goal_reached";
    case SimOutcome::kCollision: return "collision";
    case SimOutcome::kStepCap: return "step_cap";
  }
  return "unknown";
}

SimResult simulate(const Scenario& scenario, int stride) {
  scenario.validate();
  const Scene& scene = scenario.scene;
  const double dt = scene.dt;
  const double horizon = kPredictedSteps * dt;
  const int scene_steps = scene.tracks.empty() ? 0 : num_steps(scene, stride);

  SimResult result;
  RobotState state = scenario.start;
  state.phi = normalize_angle(state.phi);

  for (int k = 0; k < scenario.max_steps; ++k) {
    if (distance(state.pos, scenario.robot.goal) <= 2.0 * scenario.robot.radius) {
      result.outcome = SimOutcome::kGoalReached;
      result.events.push_back("step " + std::to_string(k) + ": goal reached");
      break;
    }

    // Plan against the pedestrians' last five observed steps.
    std::vector<EntityWindow> windows;
    if (!scene.tracks.empty() && k + kObservedSteps <= scene_steps) {
      const Grouping grouping =
          scenario.predictor.kind == PredictorKind::kSocialGroupLstm
              ? window_grouping(scene, scenario.grouping, stride, k)
              : singleton_grouping(scene, step_frame(scene, stride, k));
      windows = observation_windows_at(scene, grouping, stride, k);
    }
    WindowBatch batch;
    batch.start_step = k;
    batch.windows = windows;
    batch.truth.resize(windows.size());
    const std::vector<PredictionHorizon> horizons =
        windows.empty() ? std::vector<PredictionHorizon>{}
                        : predict_batch(scenario.predictor, scenario.params, batch);
    const ObstacleForecast forecast =
        make_forecast(windows, horizons, dt, scenario.robot.personal_radius);

    const SelectedControl sel = select_control(state, scenario.robot, forecast, horizon);
    if (sel.fallback_stop)
      result.events.push_back("step " + std::to_string(k) + ": no safe control, stopping");

    // Execute one step, auditing clearance against the scripted pedestrian
    // positions (step k+4 -> k+5) at the same resolution the planner used.
    double min_center = std::numeric_limits<double>::infinity();
    PedestrianId closest = -1;
    for (int j = 1; j <= kClearanceSubsamples; ++j) {
      const double tau = dt * j / kClearanceSubsamples;
      const Vec2 robot_pos = propagate(state, sel.control, tau, scenario.robot.wheelbase).pos;
      for (const auto& [ped, track] : scene.tracks) {
        const auto now = position_at_step(scene, track, stride, k + kObservedSteps - 1);
        if (!now) continue;
        const auto next = position_at_step(scene, track, stride, k + kObservedSteps);
        const Vec2 ped_pos = next ? lerp(*now, *next, tau / dt) : *now;
        const double d = distance(robot_pos, ped_pos);
        if (d < min_center) {
          min_center = d;
          closest = ped;
        }
      }
    }

    TraceStep step;
    step.step = k;
    step.state = state;
    step.control = sel.control;
    step.fallback_stop = sel.fallback_stop;
    step.min_clearance = min_center;
    result.trace.push_back(step);
    result.forecasts.push_back(forecast);

    if (min_center < scenario.robot.radius + scenario.robot.personal_radius) {
      result.outcome = SimOutcome::kCollision;
      result.events.push_back("step " + std::to_string(k) + ": collision with pedestrian " +
                              std::to_string(closest));
      state = propagate(state, sel.control, dt, scenario.robot.wheelbase);
      result.path_length += sel.control.u_s * dt;
      break;
    }

    state = propagate(state, sel.control, dt, scenario.robot.wheelbase);
    result.path_length += sel.control.u_s * dt;
    if (k + 1 == scenario.max_steps)
      result.events.push_back("step " + std::to_string(k + 1) + ": step cap reached");
  }

  result.final_state = state;
  return result;
}

}  // namespace sgnav
