#pragma once

#include <map>
#include <vector>

#include "sgnav/types.hpp"
#include "sgnav/windows.hpp"

namespace sgnav {

// Cohesion thresholds for rule-based group discovery.
struct GroupingConfig {
  double max_pair_distance = 2.0;   // meters
  double max_speed_diff = 0.5;      // m/s
  double max_heading_diff = 0.5236; // radians (30 deg)
  int min_persist_steps = 3;

  void validate() const;
};

// Below this speed heading is considered undefined and the heading test is
// skipped for the pair.
constexpr double kStationarySpeed = 0.1;  // m/s

struct PedKinematics {
  PedestrianId id = 0;
  Vec2 pos;  // meters
  Vec2 vel;  // m/s
};

// Links pedestrians whose distance, speed difference and heading difference
// all pass the thresholds; groups are the connected components of the link
// graph. Unlinked pedestrians become singletons. Empty input yields an empty
// partition.
Grouping cluster_frame(const std::vector<PedKinematics>& peds, const GroupingConfig& cfg,
                       FrameId frame = 0);

// Temporal hysteresis over per-step partitions: a pair survives iff it was
// co-grouped in at least `min_persist_steps` consecutive steps; the window
// grouping is the connected components of the surviving pairs. Pedestrians
// present in any step are kept (as singletons when nothing survived).
Grouping persist_groups(const std::vector<Grouping>& per_step, const GroupingConfig& cfg);

// Centroid track per group; frames where any member is missing are dropped.
std::map<GroupId, Track> group_tracks(const Scene& scene, const Grouping& grouping);

// Finite-difference kinematics of every pedestrian present at `step`.
std::vector<PedKinematics> step_kinematics(const Scene& scene, int stride, int step);

// Per-step clusterings for the whole scene (index = model step).
std::vector<Grouping> per_step_groupings(const Scene& scene, const GroupingConfig& cfg,
                                         int stride);

// Grouping for the window starting at `start_step`, persisted over its
// observed steps.
Grouping window_grouping(const Scene& scene, const GroupingConfig& cfg, int stride,
                         int start_step);

// Full pipeline: cluster per step, persist per window, build entity windows.
std::vector<WindowBatch> grouped_window_batches(const Scene& scene, const GroupingConfig& cfg,
                                                int stride);

// Same, but group membership comes from per-frame annotations instead of the
// clusterer. `per_frame` maps frame id -> grouping of that frame.
std::vector<WindowBatch> annotated_window_batches(const Scene& scene,
                                                  const std::map<FrameId, Grouping>& per_frame,
                                                  const GroupingConfig& cfg, int stride);

}  // namespace sgnav
