#include "sgnav/pooling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sgnav {

void NeighborhoodGrid::validate() const {
  if (!(extent > 0.0)) throw std::invalid_argument("grid extent must be positive");
  if (cells < 1) throw std::invalid_argument("grid must have at least one cell");
}

std::optional<std::pair<int, int>> cell_index(Vec2 rel, const NeighborhoodGrid& grid) {
  const double scale = grid.cells / (2.0 * grid.extent);
  const int m = static_cast<int>(std::floor((rel.x + grid.extent) * scale));
  const int n = static_cast<int>(std::floor((rel.y + grid.extent) * scale));
  if (m < 0 || m >= grid.cells || n < 0 || n >= grid.cells) return std::nullopt;
  return std::make_pair(m, n);
}

Tensor social_pool(PedestrianId ego_id, Vec2 ego_position,
                   const std::vector<PooledNeighbor>& neighbors,
                   const NeighborhoodGrid& grid, int hidden_dim) {
  grid.validate();
  Tensor out(grid.cells * grid.cells * hidden_dim, 1);

  std::vector<const PooledNeighbor*> ordered;
  ordered.reserve(neighbors.size());
  for (const auto& n : neighbors)
    if (n.id != ego_id) ordered.push_back(&n);
  std::sort(ordered.begin(), ordered.end(),
            [](const PooledNeighbor* a, const PooledNeighbor* b) { return a->id < b->id; });

  for (const PooledNeighbor* n : ordered) {
    const auto cell = cell_index(n->position - ego_position, grid);
    if (!cell) continue;
    if (n->hidden->size() != hidden_dim)
      throw std::invalid_argument("neighbor hidden state has the wrong dimension");
    const int base = (cell->first * grid.cells + cell->second) * hidden_dim;
    for (int d = 0; d < hidden_dim; ++d) out.v[base + d] += n->hidden->v[d];
  }
  return out;
}

Tensor occupancy_map(PedestrianId ego_id, Vec2 ego_position,
                     const std::vector<std::pair<PedestrianId, Vec2>>& neighbors,
                     const NeighborhoodGrid& grid) {
  grid.validate();
  Tensor out(grid.cells * grid.cells, 1);
  for (const auto& [id, pos] : neighbors) {
    if (id == ego_id) continue;
    const auto cell = cell_index(pos - ego_position, grid);
    if (!cell) continue;
    out.v[cell->first * grid.cells + cell->second] += 1.0;
  }
  return out;
}

Tape::Ref social_pool_node(Tape& tape, PedestrianId ego_id, Vec2 ego_position,
                           const std::vector<PooledNeighborRef>& neighbors,
                           const NeighborhoodGrid& grid, int hidden_dim) {
  grid.validate();
  std::vector<const PooledNeighborRef*> ordered;
  ordered.reserve(neighbors.size());
  for (const auto& n : neighbors)
    if (n.id != ego_id) ordered.push_back(&n);
  std::sort(ordered.begin(), ordered.end(),
            [](const PooledNeighborRef* a, const PooledNeighborRef* b) {
              return a->id < b->id;
            });

  std::vector<std::pair<Tape::Ref, int>> parts;
  for (const PooledNeighborRef* n : ordered) {
    const auto cell = cell_index(n->position - ego_position, grid);
    if (!cell) continue;
    parts.emplace_back(n->hidden, (cell->first * grid.cells + cell->second) * hidden_dim);
  }
  return tape.scatter_sum(std::move(parts), hidden_dim,
                          grid.cells * grid.cells * hidden_dim);
}

}  // namespace sgnav
