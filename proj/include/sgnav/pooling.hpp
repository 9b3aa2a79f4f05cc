#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "sgnav/autodiff.hpp"
#include "sgnav/tensor.hpp"
#include "sgnav/types.hpp"
#include "sgnav/vec2.hpp"

namespace sgnav {

// Square neighborhood centred on an entity, split into cells x cells bins.
struct NeighborhoodGrid {
  double extent = 4.0;  // metres from the centre to each edge (half-width)
  int cells = 4;        // G: bins per side

  void validate() const;
};

// Bin for a neighbor at offset `rel` from the ego entity, or nullopt when the
// neighbor lies outside the grid. Bins are half-open: rel = -extent lands in
// bin 0, rel = +extent falls outside.
//   m = floor((rel.x + extent) * G / (2 * extent)), n likewise from rel.y
std::optional<std::pair<int, int>> cell_index(Vec2 rel, const NeighborhoodGrid& grid);

struct PooledNeighbor {
  PedestrianId id = 0;  // entity id; used only to order accumulation
  Vec2 position;
  const Tensor* hidden = nullptr;  // D-vector
};

// Hidden-state pooling: a G x G x D tensor, flattened so that entry
// (m, n, d) lives at (m * G + n) * D + d, where cell (m, n) accumulates the
// hidden states of the neighbors binned there. Accumulation runs in ascending
// neighbor id so the result is independent of input order. Any neighbor whose
// id equals ego_id is skipped.
Tensor social_pool(PedestrianId ego_id, Vec2 ego_position,
                   const std::vector<PooledNeighbor>& neighbors,
                   const NeighborhoodGrid& grid, int hidden_dim);

// Presence counts on the same grid: entry m * G + n counts the neighbors
// binned to (m, n).
Tensor occupancy_map(PedestrianId ego_id, Vec2 ego_position,
                     const std::vector<std::pair<PedestrianId, Vec2>>& neighbors,
                     const NeighborhoodGrid& grid);

struct PooledNeighborRef {
  PedestrianId id = 0;
  Vec2 position;
  Tape::Ref hidden = -1;
};

// Graph twin of social_pool: the pooled tensor participates in the tape, so
// gradients flow back into each neighbor's hidden state. Binning uses the
// plain positions and contributes no gradient.
Tape::Ref social_pool_node(Tape& tape, PedestrianId ego_id, Vec2 ego_position,
                           const std::vector<PooledNeighborRef>& neighbors,
                           const NeighborhoodGrid& grid, int hidden_dim);

}  // namespace sgnav
