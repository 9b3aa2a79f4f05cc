#pragma once

#include <array>
#include <string>
#include <vector>

#include "sgnav/grouping.hpp"
#include "sgnav/model.hpp"
#include "sgnav/types.hpp"
#include "sgnav/vec2.hpp"

namespace sgnav {

struct RobotConfig {
  double radius = 0.4;        // meters
  double max_speed = 1.5;     // m/s
  double max_steering = 0.6;  // radians, must stay below pi/2
  double wheelbase = 1.0;     // meters; scales tan(steering) into curvature
  Vec2 goal;
  int speed_samples = 15;
  int steering_samples = 21;
  double steering_cost = 0.1;    // cost weight on |steering|
  double personal_radius = 0.3;  // pedestrian disc radius r_p

  void validate() const;
};

struct RobotState {
  Vec2 pos;
  double phi = 0.0;  // heading, normalized to (-pi, pi]
};

struct Control {
  double u_s = 0.0;    // speed, m/s
  double u_phi = 0.0;  // steering angle, radians
};

double normalize_angle(double a);  // into (-pi, pi]

// Arc the car-like robot traces in its body frame under a fixed control:
// curvature k = tan(u_phi)/wheelbase, position
//   ( sin(u_s k t)/k, (1 - cos(u_s k t))/k ).
// Near-zero steering switches to the series expansion of the same arc so the
// two branches agree at the switchover (|u_phi| < 1e-4).
Vec2 propagate_body(const Control& c, double t, double wheelbase);

// Heading change over the same arc: u_s * tan(u_phi) / wheelbase * t.
double propagate_heading(const Control& c, double t, double wheelbase);

// Body-frame arc rotated/translated into the world frame of `state`.
RobotState propagate(const RobotState& state, const Control& c, double t, double wheelbase);

// One moving disc the planner must not touch: a pedestrian (personal radius)
// or a whole group (centroid disc covering every member, so plans never cut
// between them).
struct ObstacleDisc {
  GroupId entity_id = 0;
  double radius = 0.0;
  Vec2 start;  // position at the last observed step
  std::array<Vec2, kPredictedSteps> positions{};
};

struct ObstacleForecast {
  std::vector<ObstacleDisc> discs;
  double dt = 0.4;  // seconds between consecutive forecast positions
};

// Disc centre at `t` seconds past the last observed step, linearly
// interpolated between forecast steps and held at the final step beyond the
// horizon.
Vec2 forecast_position(const ObstacleDisc& disc, double t, double dt);

// Builds planner obstacles from predicted entity horizons. Group radius =
// largest member offset from the centroid plus the personal radius.
ObstacleForecast make_forecast(const std::vector<EntityWindow>& windows,
                               const std::vector<PredictionHorizon>& horizons, double dt,
                               double personal_radius);

struct SelectedControl {
  Control control;
  bool fallback_stop = false;  // true when every lattice control collided
  double cost = 0.0;           // goal distance at horizon end + steering penalty
};

constexpr int kClearanceSubsamples = 20;

// Deterministic lattice search: speeds x steering angles, discarding any
// control whose propagated arc comes within robot radius + disc radius of a
// forecast disc at any of the audited subsamples of the horizon; the survivor
// with the lowest cost wins. No survivor means stop.
SelectedControl select_control(const RobotState& state, const RobotConfig& cfg,
                               const ObstacleForecast& forecast, double horizon_seconds);

// Smallest robot-to-disc-surface margin along an executed arc, sampled at the
// audit resolution: min over samples of (centre distance - disc radius -
// robot radius). Negative means overlap.
double arc_clearance(const RobotState& state, const Control& c, double duration,
                     const RobotConfig& cfg, const ObstacleForecast& forecast);

struct Scenario {
  Scene scene;  // scripted pedestrian tracks on the model-step grid
  RobotConfig robot;
  RobotState start;
  ModelConfig predictor;  // predictor.kind selects the forecaster
  ParameterSet params;    // required for the learned kinds
  GroupingConfig grouping;
  int max_steps = 200;

  void validate() const;
};

struct TraceStep {
  int step = 0;
  RobotState state;  // before applying `control`
  Control control;
  bool fallback_stop = false;
  double min_clearance = 0.0;  // min centre distance to any pedestrian while executing
};

enum class SimOutcome { kGoalReached, kCollision, kStepCap };
std::string to_string(SimOutcome outcome);

struct SimResult {
  std::vector<TraceStep> trace;
  std::vector<ObstacleForecast> forecasts;  // planner inputs, aligned with trace
  RobotState final_state;
  SimOutcome outcome = SimOutcome::kStepCap;
  std::vector<std::string> events;
  double path_length = 0.0;
};

// Steps the robot through the scripted scene: at sim step k the planner sees
// the pedestrians' steps k..k+4, predicts their next five steps, picks a
// control, and executes it for one model step. Terminates on goal contact
// (within 2 x robot radius), on collision with a pedestrian, or at the step
// cap. Deterministic.
SimResult simulate(const Scenario& scenario, int stride = 1);

}  // namespace sgnav
