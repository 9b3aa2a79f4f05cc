#include "sgnav/grouping.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace sgnav {

void GroupingConfig::validate() const {
  if (!(max_pair_distance > 0.0) || !(max_speed_diff > 0.0) || !(max_heading_diff > 0.0))
    throw std::invalid_argument("grouping thresholds must be positive");
  if (min_persist_steps < 1) throw std::invalid_argument("min_persist_steps must be >= 1");
}

namespace {

bool pair_linked(const PedKinematics& a, const PedKinematics& b, const GroupingConfig& cfg) {
  if (distance(a.pos, b.pos) > cfg.max_pair_distance) return false;
  const double speed_a = a.vel.norm();
  const double speed_b = b.vel.norm();
  if (std::abs(speed_a - speed_b) > cfg.max_speed_diff) return false;
  // Heading is undefined near standstill; skip the test then.
  if (speed_a >= kStationarySpeed && speed_b >= kStationarySpeed) {
    const double cosang = std::clamp(a.vel.dot(b.vel) / (speed_a * speed_b), -1.0, 1.0);
    if (std::acos(cosang) > cfg.max_heading_diff) return false;
  }
  return true;
}

// Connected components over an adjacency list keyed by pedestrian id.
std::vector<std::vector<PedestrianId>> components(
    const std::vector<PedestrianId>& ids,
    const std::map<PedestrianId, std::vector<PedestrianId>>& adj) {
  std::set<PedestrianId> visited;
  std::vector<std::vector<PedestrianId>> comps;
  for (PedestrianId root : ids) {
    if (visited.count(root)) continue;
    std::vector<PedestrianId> comp;
    std::vector<PedestrianId> stack{root};
    visited.insert(root);
    while (!stack.empty()) {
      PedestrianId cur = stack.back();
      stack.pop_back();
      comp.push_back(cur);
      auto it = adj.find(cur);
      if (it == adj.end()) continue;
      for (PedestrianId next : it->second) {
        if (visited.insert(next).second) stack.push_back(next);
      }
    }
    comps.push_back(std::move(comp));
  }
  return comps;
}

}  // namespace

Grouping cluster_frame(const std::vector<PedKinematics>& peds, const GroupingConfig& cfg,
                       FrameId frame) {
  cfg.validate();
  std::vector<PedestrianId> ids;
  ids.reserve(peds.size());
  for (const auto& p : peds) ids.push_back(p.id);
  std::sort(ids.begin(), ids.end());

  std::map<PedestrianId, const PedKinematics*> by_id;
  for (const auto& p : peds) {
    if (!by_id.emplace(p.id, &p).second)
      throw std::invalid_argument("duplicate pedestrian id in frame");
  }

  std::map<PedestrianId, std::vector<PedestrianId>> adj;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      if (pair_linked(*by_id.at(ids[i]), *by_id.at(ids[j]), cfg)) {
        adj[ids[i]].push_back(ids[j]);
        adj[ids[j]].push_back(ids[i]);
      }
    }
  }
  return make_grouping(frame, components(ids, adj));
}

Grouping persist_groups(const std::vector<Grouping>& per_step, const GroupingConfig& cfg) {
  cfg.validate();
  if (per_step.empty()) return Grouping{};

  std::set<PedestrianId> all;
  for (const auto& g : per_step)
    for (const auto& [gid, members] : g.assignments)
      for (PedestrianId p : members) all.insert(p);
  const std::vector<PedestrianId> ids(all.begin(), all.end());

  std::map<PedestrianId, std::vector<PedestrianId>> adj;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      int run = 0;
      int best = 0;
      for (const auto& g : per_step) {
        const GroupId ga = g.group_of(ids[i]);
        const GroupId gb = g.group_of(ids[j]);
        const bool linked = ga >= 0 && ga == gb;
        run = linked ? run + 1 : 0;
        best = std::max(best, run);
      }
      if (best >= cfg.min_persist_steps) {
        adj[ids[i]].push_back(ids[j]);
        adj[ids[j]].push_back(ids[i]);
      }
    }
  }
  auto grouping = make_grouping(per_step.front().window_start_frame, components(ids, adj));
  return grouping;
}

std::map<GroupId, Track> group_tracks(const Scene& scene, const Grouping& grouping) {
  grouping.validate();
  std::map<GroupId, Track> out;
  for (const auto& [gid, members] : grouping.assignments) {
    Track track;
    track.ped_id = gid;
    for (FrameId frame : scene.frames) {
      Vec2 sum{};
      bool complete = true;
      for (PedestrianId id : members) {
        auto it = scene.tracks.find(id);
        auto pos = it == scene.tracks.end() ? std::nullopt : it->second.position_at(frame);
        if (!pos) {
          complete = false;
          break;
        }
        sum += *pos;
      }
      if (complete) track.samples.push_back({frame, sum / static_cast<double>(members.size())});
    }
    out[gid] = std::move(track);
  }
  return out;
}

std::vector<PedKinematics> step_kinematics(const Scene& scene, int stride, int step) {
  std::vector<PedKinematics> out;
  for (const auto& [id, track] : scene.tracks) {
    auto pos = position_at_step(scene, track, stride, step);
    if (!pos) continue;
    PedKinematics k;
    k.id = id;
    k.pos = *pos;
    // Backward difference when possible, forward as fallback, zero for a
    // single isolated sample.
    auto prev = step > 0 ? position_at_step(scene, track, stride, step - 1) : std::nullopt;
    auto next = position_at_step(scene, track, stride, step + 1);
    if (prev)
      k.vel = (*pos - *prev) / scene.dt;
    else if (next)
      k.vel = (*next - *pos) / scene.dt;
    out.push_back(k);
  }
  return out;
}

std::vector<Grouping> per_step_groupings(const Scene& scene, const GroupingConfig& cfg,
                                         int stride) {
  std::vector<Grouping> out;
  const int steps = num_steps(scene, stride);
  out.reserve(steps);
  for (int s = 0; s < steps; ++s)
    out.push_back(cluster_frame(step_kinematics(scene, stride, s), cfg,
                                step_frame(scene, stride, s)));
  return out;
}

Grouping window_grouping(const Scene& scene, const GroupingConfig& cfg, int stride,
                         int start_step) {
  std::vector<Grouping> steps;
  for (int k = 0; k < kObservedSteps; ++k)
    steps.push_back(cluster_frame(step_kinematics(scene, stride, start_step + k), cfg,
                                  step_frame(scene, stride, start_step + k)));
  return persist_groups(steps, cfg);
}

namespace {

std::vector<WindowBatch> batches_from_per_step(const Scene& scene,
                                               const std::vector<Grouping>& per_step,
                                               const GroupingConfig& cfg, int stride) {
  std::vector<WindowBatch> out;
  const int steps = static_cast<int>(per_step.size());
  for (int start = 0; start + kWindowSteps <= steps; ++start) {
    const std::vector<Grouping> obs(per_step.begin() + start,
                                    per_step.begin() + start + kObservedSteps);
    Grouping grouping = persist_groups(obs, cfg);
    if (grouping.assignments.empty()) continue;
    auto batch = build_window_batch_at(scene, grouping, stride, start);
    if (batch) out.push_back(std::move(*batch));
  }
  return out;
}

}  // namespace

std::vector<WindowBatch> grouped_window_batches(const Scene& scene, const GroupingConfig& cfg,
                                                int stride) {
  return batches_from_per_step(scene, per_step_groupings(scene, cfg, stride), cfg, stride);
}

std::vector<WindowBatch> annotated_window_batches(const Scene& scene,
                                                  const std::map<FrameId, Grouping>& per_frame,
                                                  const GroupingConfig& cfg, int stride) {
  std::vector<Grouping> per_step;
  const int steps = num_steps(scene, stride);
  for (int s = 0; s < steps; ++s) {
    const FrameId frame = step_frame(scene, stride, s);
    auto it = per_frame.find(frame);
    if (it != per_frame.end()) {
      per_step.push_back(it->second);
      per_step.back().window_start_frame = frame;
    } else {
      // Unannotated steps contribute no links; pedestrians present become
      // singletons so the persistence scan still sees them.
      Grouping g;
      g.window_start_frame = frame;
      for (const auto& k : step_kinematics(scene, stride, s)) g.assignments[k.id] = {k.id};
      per_step.push_back(std::move(g));
    }
  }
  return batches_from_per_step(scene, per_step, cfg, stride);
}

}  // namespace sgnav
