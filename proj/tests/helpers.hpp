#pragma once

// Small scene-construction utilities shared by the test binaries.

#include <array>
#include <cmath>
#include <set>
#include <vector>

#include "sgnav/rng.hpp"
#include "sgnav/types.hpp"

namespace testutil {

inline void add_sample(sgnav::Scene& scene, sgnav::PedestrianId id, sgnav::FrameId frame,
                       double x, double y) {
  auto& track = scene.tracks[id];
  track.ped_id = id;
  track.samples.push_back({frame, {x, y}});
}

// Collects the frame set from the tracks and validates.
inline void finalize(sgnav::Scene& scene) {
  std::set<sgnav::FrameId> frames(scene.frames.begin(), scene.frames.end());
  for (const auto& [id, track] : scene.tracks)
    for (const auto& s : track.samples) frames.insert(s.frame);
  scene.frames.assign(frames.begin(), frames.end());
  scene.validate();
}

// Pedestrians walking straight lines at distinct headings, one sample per
// frame 0..steps-1. Deterministic and fully present, so every window exists.
inline sgnav::Scene straight_scene(int peds, int steps) {
  sgnav::Scene scene;
  for (int p = 1; p <= peds; ++p) {
    const double heading = 0.37 * p;
    for (int t = 0; t < steps; ++t)
      add_sample(scene, p, t, 2.0 * p + 0.5 * t * std::cos(heading),
                 -1.5 * p + 0.5 * t * std::sin(heading));
  }
  finalize(scene);
  return scene;
}

// Random-walk scene for oracle sweeps: positions jump uniformly inside a box,
// every pedestrian present at every frame.
inline sgnav::Scene random_scene(sgnav::Rng& rng, int peds, int steps, double half_width) {
  sgnav::Scene scene;
  for (int p = 1; p <= peds; ++p)
    for (int t = 0; t < steps; ++t)
      add_sample(scene, p, t, rng.uniform(-half_width, half_width),
                 rng.uniform(-half_width, half_width));
  finalize(scene);
  return scene;
}

}  // namespace testutil
