#include "sgnav/types.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

namespace sgnav {

std::optional<Vec2> Track::position_at(FrameId frame) const {
  auto it = std::lower_bound(samples.begin(), samples.end(), frame,
                             [](const TrackSample& s, FrameId f) { return s.frame < f; });
  if (it == samples.end() || it->frame != frame) return std::nullopt;
  return it->pos;
}

void Scene::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("scene dt must be positive");
  for (std::size_t i = 1; i < frames.size(); ++i) {
    if (frames[i] <= frames[i - 1])
      throw std::invalid_argument("scene frames must be strictly increasing");
  }
  const std::set<FrameId> known(frames.begin(), frames.end());
  for (const auto& [id, track] : tracks) {
    if (track.ped_id != id) throw std::invalid_argument("track key does not match ped_id");
    for (std::size_t i = 0; i < track.samples.size(); ++i) {
      if (i > 0 && track.samples[i].frame <= track.samples[i - 1].frame)
        throw std::invalid_argument("track " + std::to_string(id) +
                                    " samples not strictly ordered by frame");
      if (!known.count(track.samples[i].frame))
        throw std::invalid_argument("track " + std::to_string(id) +
                                    " references frame absent from scene");
      if (!std::isfinite(track.samples[i].pos.x) || !std::isfinite(track.samples[i].pos.y))
        throw std::invalid_argument("track " + std::to_string(id) + " has non-finite position");
    }
  }
}

void Grouping::validate() const {
  std::set<PedestrianId> seen;
  for (const auto& [gid, members] : assignments) {
    if (members.empty()) throw std::invalid_argument("empty group in grouping");
    if (!std::is_sorted(members.begin(), members.end()))
      throw std::invalid_argument("group members must be sorted");
    if (gid != members.front())
      throw std::invalid_argument("group id must equal smallest member id");
    for (PedestrianId p : members) {
      if (!seen.insert(p).second)
        throw std::invalid_argument("pedestrian " + std::to_string(p) +
                                    " appears in more than one group");
    }
  }
}

GroupId Grouping::group_of(PedestrianId id) const {
  for (const auto& [gid, members] : assignments) {
    if (std::binary_search(members.begin(), members.end(), id)) return gid;
  }
  return -1;
}

Grouping make_grouping(FrameId window_start_frame,
                       const std::vector<std::vector<PedestrianId>>& groups) {
  Grouping g;
  g.window_start_frame = window_start_frame;
  for (auto members : groups) {
    if (members.empty()) continue;
    std::sort(members.begin(), members.end());
    g.assignments[members.front()] = std::move(members);
  }
  g.validate();
  return g;
}

void EntityWindow::validate() const {
  if (member_offsets.empty()) throw std::invalid_argument("entity window has no members");
  // Offsets must be consistent: they are measured from the centroid at the
  // last observed step, so they average to zero.
  Vec2 mean{};
  for (const auto& [id, off] : member_offsets) mean += off;
  mean = mean / static_cast<double>(member_offsets.size());
  if (std::abs(mean.x) > 1e-9 || std::abs(mean.y) > 1e-9)
    throw std::invalid_argument("member offsets do not center on the observed centroid");
}

FrameId step_frame(const Scene& scene, int stride, int step) {
  if (scene.frames.empty()) throw std::invalid_argument("scene has no frames");
  if (stride < 1) throw std::invalid_argument("stride must be >= 1");
  return scene.frames.front() + static_cast<FrameId>(step) * stride;
}

int num_steps(const Scene& scene, int stride) {
  if (scene.frames.empty()) return 0;
  if (stride < 1) throw std::invalid_argument("stride must be >= 1");
  return static_cast<int>((scene.frames.back() - scene.frames.front()) / stride) + 1;
}

std::optional<Vec2> position_at_step(const Scene& scene, const Track& track, int stride,
                                     int step) {
  return track.position_at(step_frame(scene, stride, step));
}

}  // namespace sgnav
