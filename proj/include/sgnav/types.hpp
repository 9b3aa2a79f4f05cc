#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "sgnav/vec2.hpp"

namespace sgnav {

using PedestrianId = int;
using GroupId = int;
using FrameId = std::int64_t;

// The 5-in / 5-out window scheme used by every predictor.
constexpr int kObservedSteps = 5;
constexpr int kPredictedSteps = 5;
constexpr int kWindowSteps = kObservedSteps + kPredictedSteps;

struct TrackSample {
  FrameId frame = 0;
  Vec2 pos;  // meters
};

struct Track {
  PedestrianId ped_id = 0;
  std::vector<TrackSample> samples;  // ordered by frame, at most one per frame

  std::optional<Vec2> position_at(FrameId frame) const;
};

// Per-frame positions of identified pedestrians. Immutable once validated.
struct Scene {
  std::vector<FrameId> frames;  // strictly increasing
  double dt = 0.4;              // seconds per model step
  std::map<PedestrianId, Track> tracks;

  void validate() const;  // throws std::invalid_argument on broken invariants
};

// Partition of pedestrians into groups over one observation window.
// Loners are singleton groups. Group ids equal the smallest member id,
// which keeps ids stable and makes singleton partitions line up with
// per-pedestrian entity ids.
struct Grouping {
  FrameId window_start_frame = 0;
  std::map<GroupId, std::vector<PedestrianId>> assignments;  // members sorted

  void validate() const;
  GroupId group_of(PedestrianId id) const;  // -1 when absent
};

Grouping make_grouping(FrameId window_start_frame,
                       const std::vector<std::vector<PedestrianId>>& groups);

// 5 observed group-centroid positions plus each member's offset from the
// centroid at the final observed step.
struct EntityWindow {
  GroupId entity_id = 0;
  int start_step = 0;  // model-step index of observed[0]
  std::array<Vec2, kObservedSteps> observed{};
  std::map<PedestrianId, Vec2> member_offsets;

  void validate() const;
};

// Bivariate normal over a planar position.
struct Gaussian2D {
  Vec2 mu;
  Vec2 sigma{1.0, 1.0};  // sigma.x > 0, sigma.y > 0
  double rho = 0.0;      // |rho| < 1
};

struct PredictionHorizon {
  std::array<Vec2, kPredictedSteps> points{};  // means when gaussians present
  std::optional<std::array<Gaussian2D, kPredictedSteps>> gaussians;
};

// --- model-step grid -------------------------------------------------------
//
// Model steps subsample the raw frame sequence: step k lives at frame
// first_frame + k*stride. An entity participates in a step only if it has a
// sample at exactly that frame.

FrameId step_frame(const Scene& scene, int stride, int step);
int num_steps(const Scene& scene, int stride);
std::optional<Vec2> position_at_step(const Scene& scene, const Track& track, int stride,
                                     int step);

}  // namespace sgnav
