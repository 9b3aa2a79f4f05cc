#include "sgnav/windows.hpp"

#include <stdexcept>

namespace sgnav {

namespace {

// Centroid of a group at one step; nullopt when any member is missing.
std::optional<Vec2> group_centroid_at(const Scene& scene,
                                      const std::vector<PedestrianId>& members, int stride,
                                      int step) {
  Vec2 sum{};
  for (PedestrianId id : members) {
    auto it = scene.tracks.find(id);
    if (it == scene.tracks.end()) return std::nullopt;
    auto pos = position_at_step(scene, it->second, stride, step);
    if (!pos) return std::nullopt;
    sum += *pos;
  }
  return sum / static_cast<double>(members.size());
}

}  // namespace

std::optional<WindowBatch> build_window_batch_at(const Scene& scene, const Grouping& grouping,
                                                 int stride, int start_step) {
  grouping.validate();
  WindowBatch batch;
  batch.start_step = start_step;
  for (const auto& [gid, members] : grouping.assignments) {
    std::array<Vec2, kWindowSteps> centroid;
    bool complete = true;
    for (int k = 0; k < kWindowSteps && complete; ++k) {
      auto pos = group_centroid_at(scene, members, stride, start_step + k);
      if (!pos)
        complete = false;
      else
        centroid[k] = *pos;
    }
    if (!complete) continue;

    EntityWindow win;
    win.entity_id = gid;
    win.start_step = start_step;
    for (int k = 0; k < kObservedSteps; ++k) win.observed[k] = centroid[k];
    const Vec2 anchor = centroid[kObservedSteps - 1];
    for (PedestrianId id : members) {
      const Vec2 pos =
          *position_at_step(scene, scene.tracks.at(id), stride, start_step + kObservedSteps - 1);
      win.member_offsets[id] = pos - anchor;
    }
    win.validate();

    PredictionHorizon truth;
    for (int k = 0; k < kPredictedSteps; ++k) truth.points[k] = centroid[kObservedSteps + k];

    batch.windows.push_back(std::move(win));
    batch.truth.push_back(std::move(truth));
  }
  if (batch.windows.empty()) return std::nullopt;
  return batch;
}

std::vector<std::pair<EntityWindow, PredictionHorizon>> build_windows(const Scene& scene,
                                                                      const Grouping& grouping,
                                                                      int stride) {
  std::vector<std::pair<EntityWindow, PredictionHorizon>> out;
  const int steps = num_steps(scene, stride);
  for (int start = 0; start + kWindowSteps <= steps; ++start) {
    auto batch = build_window_batch_at(scene, grouping, stride, start);
    if (!batch) continue;
    for (std::size_t i = 0; i < batch->windows.size(); ++i)
      out.emplace_back(std::move(batch->windows[i]), std::move(batch->truth[i]));
  }
  return out;
}

Grouping singleton_grouping(const Scene& scene, FrameId window_start_frame) {
  Grouping g;
  g.window_start_frame = window_start_frame;
  for (const auto& [id, track] : scene.tracks) g.assignments[id] = {id};
  return g;
}

std::vector<WindowBatch> singleton_window_batches(const Scene& scene, int stride) {
  std::vector<WindowBatch> out;
  if (scene.frames.empty()) return out;
  const Grouping singles = singleton_grouping(scene, scene.frames.front());
  const int steps = num_steps(scene, stride);
  for (int start = 0; start + kWindowSteps <= steps; ++start) {
    auto batch = build_window_batch_at(scene, singles, stride, start);
    if (batch) out.push_back(std::move(*batch));
  }
  return out;
}

std::vector<WindowBatch> fixed_grouping_window_batches(const Scene& scene,
                                                       const Grouping& grouping, int stride) {
  std::vector<WindowBatch> out;
  const int steps = num_steps(scene, stride);
  for (int start = 0; start + kWindowSteps <= steps; ++start) {
    auto batch = build_window_batch_at(scene, grouping, stride, start);
    if (batch) out.push_back(std::move(*batch));
  }
  return out;
}

std::vector<EntityWindow> observation_windows_at(const Scene& scene, const Grouping& grouping,
                                                 int stride, int start_step) {
  grouping.validate();
  std::vector<EntityWindow> out;
  for (const auto& [gid, members] : grouping.assignments) {
    EntityWindow win;
    win.entity_id = gid;
    win.start_step = start_step;
    bool complete = true;
    for (int k = 0; k < kObservedSteps && complete; ++k) {
      auto pos = group_centroid_at(scene, members, stride, start_step + k);
      if (!pos)
        complete = false;
      else
        win.observed[k] = *pos;
    }
    if (!complete) continue;
    const Vec2 anchor = win.observed[kObservedSteps - 1];
    for (PedestrianId id : members) {
      const Vec2 pos =
          *position_at_step(scene, scene.tracks.at(id), stride, start_step + kObservedSteps - 1);
      win.member_offsets[id] = pos - anchor;
    }
    win.validate();
    out.push_back(std::move(win));
  }
  return out;
}

std::map<PedestrianId, std::array<Vec2, kPredictedSteps>> per_person_predictions(
    const EntityWindow& window, const PredictionHorizon& horizon) {
  std::map<PedestrianId, std::array<Vec2, kPredictedSteps>> out;
  for (const auto& [id, offset] : window.member_offsets) {
    std::array<Vec2, kPredictedSteps> path;
    for (int k = 0; k < kPredictedSteps; ++k) path[k] = horizon.points[k] + offset;
    out[id] = path;
  }
  return out;
}

}  // namespace sgnav
