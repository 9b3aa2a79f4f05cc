#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "sgnav/pooling.hpp"
#include "sgnav/rng.hpp"

using namespace sgnav;

namespace {

// Independent binning used as the oracle: scan cells and test the half-open
// interval [lo, hi) directly instead of dividing.
std::optional<std::pair<int, int>> brute_cell(Vec2 rel, const NeighborhoodGrid& grid) {
  const double side = 2.0 * grid.extent / grid.cells;
  for (int m = 0; m < grid.cells; ++m) {
    const double x_lo = -grid.extent + m * side;
    if (!(rel.x >= x_lo && rel.x < x_lo + side)) continue;
    for (int n = 0; n < grid.cells; ++n) {
      const double y_lo = -grid.extent + n * side;
      if (rel.y >= y_lo && rel.y < y_lo + side) return std::make_pair(m, n);
    }
  }
  return std::nullopt;
}

Tensor brute_social_pool(PedestrianId ego_id, Vec2 ego_pos,
                         const std::vector<PooledNeighbor>& neighbors,
                         const NeighborhoodGrid& grid, int hidden_dim) {
  Tensor out(grid.cells * grid.cells * hidden_dim, 1);
  // Ascending-id accumulation, mirroring the contract.
  std::vector<PooledNeighbor> sorted = neighbors;
  std::sort(sorted.begin(), sorted.end(),
            [](const PooledNeighbor& a, const PooledNeighbor& b) { return a.id < b.id; });
  for (const PooledNeighbor& nb : sorted) {
    if (nb.id == ego_id) continue;
    const auto cell = brute_cell(nb.position - ego_pos, grid);
    if (!cell) continue;
    const int base = (cell->first * grid.cells + cell->second) * hidden_dim;
    for (int d = 0; d < hidden_dim; ++d) out.v[base + d] += nb.hidden->v[d];
  }
  return out;
}

}  // namespace

TEST_CASE("cell indexing: boundaries are half-open and the centre is centred") {
  NeighborhoodGrid grid;  // extent 4, 4 cells => 2 m cells
  CHECK(cell_index({-4.0, -4.0}, grid) == std::make_pair(0, 0));
  CHECK(cell_index({4.0, 0.0}, grid) == std::nullopt);
  CHECK(cell_index({0.0, 4.0}, grid) == std::nullopt);
  CHECK(cell_index({-4.0 - 1e-9, 0.0}, grid) == std::nullopt);
  CHECK(cell_index({0.0, 0.0}, grid) == std::make_pair(2, 2));
  CHECK(cell_index({-1e-12, -1e-12}, grid) == std::make_pair(1, 1));
  CHECK(cell_index({3.999, -3.999}, grid) == std::make_pair(3, 0));
  CHECK(cell_index({1.9999999, 2.0}, grid) == std::make_pair(2, 3));

  SUBCASE("odd cell counts and non-unit extents") {
    grid.cells = 3;
    grid.extent = 1.5;
    CHECK(cell_index({0.0, 0.0}, grid) == std::make_pair(1, 1));
    CHECK(cell_index({-0.5, 0.5}, grid) == std::make_pair(1, 2));
    CHECK(cell_index({-0.500001, 0.5}, grid) == std::make_pair(0, 2));
  }
  SUBCASE("grid validation") {
    grid.cells = 0;
    CHECK_THROWS_AS(grid.validate(), std::invalid_argument);
    grid = NeighborhoodGrid{};
    grid.extent = 0.0;
    CHECK_THROWS_AS(grid.validate(), std::invalid_argument);
  }
}

TEST_CASE("cell indexing agrees with interval scanning everywhere") {
  Rng rng(404);
  NeighborhoodGrid grid;
  for (int trial = 0; trial < 20000; ++trial) {
    grid.cells = 1 + static_cast<int>(rng.uniform(0.0, 6.0));
    grid.extent = rng.uniform(0.5, 6.0);
    const Vec2 rel{rng.uniform(-1.2 * grid.extent, 1.2 * grid.extent),
                   rng.uniform(-1.2 * grid.extent, 1.2 * grid.extent)};
    CHECK(cell_index(rel, grid) == brute_cell(rel, grid));
  }
}

TEST_CASE("hidden-state pooling matches the brute-force oracle") {
  Rng rng(77);
  const int hidden_dim = 3;

  for (int scene = 0; scene < 300; ++scene) {
    NeighborhoodGrid grid;
    grid.cells = 2 + static_cast<int>(rng.uniform(0.0, 3.0));
    grid.extent = rng.uniform(1.0, 5.0);

    const int count = static_cast<int>(rng.uniform(0.0, 7.0));
    std::vector<Tensor> hiddens(count);
    std::vector<PooledNeighbor> neighbors(count);
    for (int i = 0; i < count; ++i) {
      hiddens[i] = Tensor(hidden_dim, 1);
      for (double& v : hiddens[i].v) v = rng.uniform(-2.0, 2.0);
      // Distinct ids in shuffled order (7 is coprime to every count <= 6);
      // id 50 — the ego — shows up whenever count >= 2.
      neighbors[i] = {static_cast<PedestrianId>(49 + (i * 7) % count),
                      {rng.uniform(-6.0, 6.0), rng.uniform(-6.0, 6.0)},
                      &hiddens[i]};
    }
    const Vec2 ego{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};

    const Tensor fast = social_pool(50, ego, neighbors, grid, hidden_dim);
    const Tensor slow = brute_social_pool(50, ego, neighbors, grid, hidden_dim);
    REQUIRE(fast.same_shape(slow));
    for (std::size_t k = 0; k < fast.v.size(); ++k) {
      REQUIRE(std::abs(fast.v[k] - slow.v[k]) <= 1e-12);
    }
  }
}

TEST_CASE("pooling layout puts cell (m, n) at (m * G + n) * D") {
  NeighborhoodGrid grid;
  grid.cells = 2;
  grid.extent = 2.0;
  const Tensor h = Tensor::vector({5.0, 7.0});
  // Offset (1, -1) => m = floor((1+2)*2/4) = 1, n = floor((-1+2)*2/4) = 0.
  const Tensor pooled = social_pool(1, {0, 0}, {{2, {1.0, -1.0}, &h}}, grid, 2);
  REQUIRE(pooled.rows == 8);
  CHECK(pooled.v[(1 * 2 + 0) * 2 + 0] == 5.0);
  CHECK(pooled.v[(1 * 2 + 0) * 2 + 1] == 7.0);
  for (const int k : {0, 1, 2, 3, 6, 7}) CHECK(pooled.v[k] == 0.0);
}

TEST_CASE("the ego entity never pools itself") {
  NeighborhoodGrid grid;
  const Tensor h = Tensor::vector({1.0});
  const Tensor pooled = social_pool(9, {0, 0}, {{9, {0.5, 0.5}, &h}}, grid, 1);
  for (const double v : pooled.v) CHECK(v == 0.0);
}

TEST_CASE("accumulation order is fixed by id, not input order") {
  // With doubles, (a + b) + c != (a + c) + b in general; sorting by id makes
  // the sum reproducible for any input permutation.
  NeighborhoodGrid grid;
  grid.cells = 1;
  grid.extent = 10.0;
  const Tensor ha = Tensor::vector({0.1});
  const Tensor hb = Tensor::vector({1e16});
  const Tensor hc = Tensor::vector({-1e16});
  std::vector<PooledNeighbor> order1{{1, {1, 1}, &ha}, {2, {2, 2}, &hb}, {3, {3, 3}, &hc}};
  std::vector<PooledNeighbor> order2{{3, {3, 3}, &hc}, {1, {1, 1}, &ha}, {2, {2, 2}, &hb}};
  std::vector<PooledNeighbor> order3{{2, {2, 2}, &hb}, {3, {3, 3}, &hc}, {1, {1, 1}, &ha}};
  const double r1 = social_pool(0, {0, 0}, order1, grid, 1).v[0];
  CHECK(social_pool(0, {0, 0}, order2, grid, 1).v[0] == r1);
  CHECK(social_pool(0, {0, 0}, order3, grid, 1).v[0] == r1);
}

TEST_CASE("occupancy maps count neighbors per cell") {
  NeighborhoodGrid grid;
  grid.cells = 2;
  grid.extent = 2.0;
  const std::vector<std::pair<PedestrianId, Vec2>> neighbors{
      {2, {-1.0, -1.0}},  // cell (0, 0)
      {3, {-1.5, -0.5}},  // cell (0, 0)
      {4, {1.0, 1.0}},    // cell (1, 1)
      {5, {9.0, 9.0}},    // outside
      {1, {-1.0, -1.0}},  // ego, skipped
  };
  const Tensor occ = occupancy_map(1, {0, 0}, neighbors, grid);
  REQUIRE(occ.rows == 4);
  CHECK(occ.v[0] == 2.0);
  CHECK(occ.v[1] == 0.0);
  CHECK(occ.v[2] == 0.0);
  CHECK(occ.v[3] == 1.0);
}

TEST_CASE("graph pooling matches the value version and routes gradients") {
  NeighborhoodGrid grid;
  grid.cells = 2;
  grid.extent = 2.0;
  const int hidden_dim = 2;

  Tape tape;
  const Tensor ha = Tensor::vector({0.3, -0.4});
  const Tensor hb = Tensor::vector({1.1, 0.2});
  const Tensor hc = Tensor::vector({-0.5, 0.9});
  const auto ra = tape.leaf(ha, true);
  const auto rb = tape.leaf(hb, true);
  const auto rc = tape.leaf(hc, true);

  // a and b share a cell; c is outside the grid.
  const std::vector<PooledNeighborRef> refs{
      {2, {-1.0, -1.0}, ra}, {3, {-0.5, -1.5}, rb}, {4, {5.0, 0.0}, rc}};
  const auto pooled = social_pool_node(tape, 1, {0, 0}, refs, grid, hidden_dim);

  const std::vector<PooledNeighbor> values{
      {2, {-1.0, -1.0}, &ha}, {3, {-0.5, -1.5}, &hb}, {4, {5.0, 0.0}, &hc}};
  const Tensor plain = social_pool(1, {0, 0}, values, grid, hidden_dim);
  REQUIRE(tape.value(pooled).same_shape(plain));
  for (std::size_t k = 0; k < plain.v.size(); ++k)
    CHECK(tape.value(pooled).v[k] == plain.v[k]);

  // Loss = first component of the shared cell: both contributors receive the
  // gradient, the out-of-grid neighbor receives none.
  tape.backward(tape.slice(pooled, 0, 1));
  CHECK(tape.grad(ra)[0] == 1.0);
  CHECK(tape.grad(rb)[0] == 1.0);
  CHECK(tape.grad(ra)[1] == 0.0);
  CHECK(tape.grad(rc)[0] == 0.0);
  CHECK(tape.grad(rc)[1] == 0.0);
}

TEST_CASE("empty neighborhoods pool to zero") {
  NeighborhoodGrid grid;
  const Tensor pooled = social_pool(1, {0, 0}, {}, grid, 4);
  CHECK(pooled.rows == 16 * 4);
  for (const double v : pooled.v) CHECK(v == 0.0);

  Tape tape;
  const auto node = social_pool_node(tape, 1, {0, 0}, {}, grid, 4);
  for (const double v : tape.value(node).v) CHECK(v == 0.0);
}
