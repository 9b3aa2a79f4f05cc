#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "sgnav/types.hpp"

namespace sgnav {

// All entity windows of one scene sharing the same start step. Entities are
// sorted by id; `truth[i]` is the ground-truth centroid horizon of
// `windows[i]`. Predictors consume whole batches because social pooling
// couples the entities of a batch.
struct WindowBatch {
  int start_step = 0;
  std::vector<EntityWindow> windows;
  std::vector<PredictionHorizon> truth;
};

// Slides a fixed grouping over the whole scene (step +1 per window). Entities
// missing any of the 10 steps at a given start are skipped there. An empty
// result is a valid "no windows" outcome, not an error.
std::vector<std::pair<EntityWindow, PredictionHorizon>> build_windows(const Scene& scene,
                                                                      const Grouping& grouping,
                                                                      int stride);

// Windows of one grouping at one start step, or nullopt when no entity is
// complete there.
std::optional<WindowBatch> build_window_batch_at(const Scene& scene, const Grouping& grouping,
                                                 int stride, int start_step);

// Every pedestrian as its own singleton group, slid over the scene.
std::vector<WindowBatch> singleton_window_batches(const Scene& scene, int stride);
Grouping singleton_grouping(const Scene& scene, FrameId window_start_frame);

// One fixed partition slid over the scene (for ground-truth groupings).
std::vector<WindowBatch> fixed_grouping_window_batches(const Scene& scene,
                                                       const Grouping& grouping, int stride);

// Windows over the observed steps only, with no ground-truth horizon, for
// online consumers that predict past the end of the recorded data. Entities
// incomplete over the observed span are skipped.
std::vector<EntityWindow> observation_windows_at(const Scene& scene, const Grouping& grouping,
                                                 int stride, int start_step);

// Reconstructs member trajectories from a group horizon: each member keeps its
// offset from the centroid at the last observed step.
std::map<PedestrianId, std::array<Vec2, kPredictedSteps>> per_person_predictions(
    const EntityWindow& window, const PredictionHorizon& horizon);

}  // namespace sgnav
