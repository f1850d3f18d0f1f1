#include <doctest.h>

#include <set>

#include "cemhelm/grid.hpp"

using namespace cemhelm;

TEST_CASE("fine grid sizes") {
  const FineGrid one = build_fine_grid(1, 1);
  CHECK(one.num_nodes() == 4);
  CHECK(one.num_cells() == 1);

  const FineGrid g = build_fine_grid(200, 200);
  CHECK(g.num_nodes() == 40401);
  CHECK(g.num_cells() == 40000);
  CHECK(g.h() == doctest::Approx(0.005));
  CHECK(g.h() * static_cast<double>(g.nx()) == doctest::Approx(1.0));
}

TEST_CASE("numbering is lexicographic and cells run counterclockwise") {
  const FineGrid g(2, 2);
  const auto c0 = g.cell_nodes(0);
  CHECK(c0[0] == 0);
  CHECK(c0[1] == 1);
  CHECK(c0[2] == 4);
  CHECK(c0[3] == 3);
  CHECK(g.node(2, 1) == 5);
  CHECK(g.coords(5).x() == doctest::Approx(1.0));
  CHECK(g.coords(5).y() == doctest::Approx(0.5));
  CHECK(g.on_boundary(0));
  CHECK_FALSE(g.on_boundary(4));
}

TEST_CASE("non-square grids are rejected") {
  CHECK_THROWS_AS(FineGrid(2, 3), Error);
  CHECK_THROWS_AS(FineGrid(0, 0), Error);
}

TEST_CASE("coarse grid blocks") {
  const FineGrid g(200, 200);
  const CoarseGrid c10(g, 10);
  CHECK(c10.num_elements() == 100);
  CHECK(c10.cells_per_element() == 20);
  CHECK(c10.element_cells(0).size() == 400);
  const CoarseGrid c40(g, 40);
  CHECK(c40.element_cells(7).size() == 25);

  const FineGrid small(6, 6);
  const CoarseGrid same(small, 6);
  for (Index j = 0; j < same.num_elements(); ++j) CHECK(same.element_cells(j).size() == 1);

  try {
    CoarseGrid bad(g, 7);
    FAIL("expected IndivisibleMesh");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kIndivisibleMesh);
  }
}

TEST_CASE("every fine cell belongs to exactly one coarse element") {
  const FineGrid g(12, 12);
  const CoarseGrid c(g, 4);
  std::vector<int> owner(static_cast<std::size_t>(g.num_cells()), 0);
  for (Index j = 0; j < c.num_elements(); ++j) {
    for (Index cell : c.element_cells(j)) {
      owner[static_cast<std::size_t>(cell)] += 1;
      CHECK(c.element_of_cell(cell) == j);
    }
  }
  for (int o : owner) CHECK(o == 1);
}

TEST_CASE("oversampling patches") {
  const FineGrid g(20, 20);
  const CoarseGrid c(g, 5);
  const Index interior = c.element(2, 2);
  const Index corner = c.element(0, 0);

  const Patch p0 = oversample(c, interior, 0);
  CHECK(p0.element_ids.size() == 1);
  CHECK(p0.element_ids[0] == interior);

  CHECK(oversample(c, interior, 1).element_ids.size() == 9);
  CHECK(oversample(c, corner, 1).element_ids.size() == 4);

  // Closure-intersection recursion enumerated directly.
  for (Index j = 0; j < c.num_elements(); ++j) {
    std::set<Index> set{j};
    for (Index m = 1; m <= 3; ++m) {
      std::set<Index> grown = set;
      for (Index e = 0; e < c.num_elements(); ++e) {
        for (Index s : set) {
          if (std::abs(c.element_x(e) - c.element_x(s)) <= 1 &&
              std::abs(c.element_y(e) - c.element_y(s)) <= 1) {
            grown.insert(e);
          }
        }
      }
      set = grown;
      const Patch p = oversample(c, j, m);
      CHECK(std::set<Index>(p.element_ids.begin(), p.element_ids.end()) == set);
      CHECK(oversample(c, j, m).nodes.contains(oversample(c, j, m - 1).nodes));
    }
  }
  CHECK_THROWS_AS(oversample(c, 25, 1), Error);
  CHECK_THROWS_AS(oversample(c, 0, -1), Error);
}

TEST_CASE("patch trace masks") {
  const FineGrid g(8, 8);
  const CoarseGrid c(g, 4);
  const Patch corner = oversample(c, c.element(0, 0), 1);
  // Nodes on x = 0 or y = 0 stay free; the inner sides are constrained.
  for (std::size_t a = 0; a < corner.node_ids.size(); ++a) {
    const Index n = corner.node_ids[a];
    const Index ix = g.node_x(n), iy = g.node_y(n);
    const bool inner_side = ix == corner.nodes.x1 || iy == corner.nodes.y1;
    CHECK(corner.free[a] == !inner_side);
  }
  const Patch strict = oversample(c, c.element(0, 0), 1, PatchTrace::kStrict);
  for (std::size_t a = 0; a < strict.node_ids.size(); ++a) {
    const Index n = strict.node_ids[a];
    const bool edge = g.node_x(n) == strict.nodes.x0 || g.node_x(n) == strict.nodes.x1 ||
                      g.node_y(n) == strict.nodes.y0 || g.node_y(n) == strict.nodes.y1;
    CHECK(strict.free[a] == !edge);
  }
  const Patch whole = oversample(c, 5, 4);
  CHECK(whole.covers_domain(c));
  CHECK(whole.num_free() == g.num_nodes());
}
