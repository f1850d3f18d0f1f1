#include "cemhelm/grid.hpp"

#include <string>

namespace cemhelm {

FineGrid::FineGrid(Index nx, Index ny) : nx_(nx), ny_(ny), h_(0.0) {
  if (nx < 1 || ny < 1) {
    throw Error(ErrorKind::kInvalidArgument, "fine grid needs at least one cell per direction");
  }
  if (nx != ny) {
    throw Error(ErrorKind::kInvalidArgument, "fine grid must be square (nx == ny)");
  }
  h_ = 1.0 / static_cast<double>(nx);
}

std::array<Index, 4> FineGrid::cell_nodes(Index c) const {
  const Index cx = c % nx_;
  const Index cy = c / nx_;
  return {node(cx, cy), node(cx + 1, cy), node(cx + 1, cy + 1), node(cx, cy + 1)};
}

bool FineGrid::on_boundary(Index n) const {
  const Index ix = node_x(n);
  const Index iy = node_y(n);
  return ix == 0 || iy == 0 || ix == nx_ || iy == ny_;
}

std::vector<Index> FineGrid::nodes_in(const IndexRect& rect) const {
  std::vector<Index> out;
  out.reserve(static_cast<std::size_t>(rect.count()));
  for (Index iy = rect.y0; iy <= rect.y1; ++iy) {
    for (Index ix = rect.x0; ix <= rect.x1; ++ix) out.push_back(node(ix, iy));
  }
  return out;
}

FineGrid build_fine_grid(Index nx, Index ny) { return FineGrid(nx, ny); }

CoarseGrid::CoarseGrid(const FineGrid& fine, Index nh) : fine_(fine), nh_(nh), ratio_(0) {
  if (nh < 1 || fine.nx() % nh != 0) {
    throw Error(ErrorKind::kIndivisibleMesh, "coarse size " + std::to_string(nh) +
                                                 " does not divide fine size " +
                                                 std::to_string(fine.nx()));
  }
  ratio_ = fine.nx() / nh;
}

void CoarseGrid::check_element(Index j) const {
  if (j < 0 || j >= num_elements()) {
    throw Error(ErrorKind::kInvalidElement, "element " + std::to_string(j) + " out of range");
  }
}

IndexRect CoarseGrid::element_node_rect(Index j) const {
  check_element(j);
  const Index ex = element_x(j);
  const Index ey = element_y(j);
  return {ex * ratio_, ey * ratio_, (ex + 1) * ratio_, (ey + 1) * ratio_};
}

std::vector<Index> CoarseGrid::element_cells(Index j) const {
  check_element(j);
  const Index ex = element_x(j);
  const Index ey = element_y(j);
  std::vector<Index> out;
  out.reserve(static_cast<std::size_t>(ratio_ * ratio_));
  for (Index cy = ey * ratio_; cy < (ey + 1) * ratio_; ++cy) {
    for (Index cx = ex * ratio_; cx < (ex + 1) * ratio_; ++cx) out.push_back(fine_.cell(cx, cy));
  }
  return out;
}

std::vector<Index> CoarseGrid::element_nodes(Index j) const {
  return fine_.nodes_in(element_node_rect(j));
}

Index CoarseGrid::element_of_cell(Index c) const {
  const Index cx = c % fine_.nx();
  const Index cy = c / fine_.nx();
  return element(cx / ratio_, cy / ratio_);
}

bool CoarseGrid::touches_boundary(Index j) const {
  check_element(j);
  const Index ex = element_x(j);
  const Index ey = element_y(j);
  return ex == 0 || ey == 0 || ex == nh_ - 1 || ey == nh_ - 1;
}

CoarseGrid build_coarse_grid(const FineGrid& fine, Index nh) { return CoarseGrid(fine, nh); }

Index Patch::num_free() const {
  Index n = 0;
  for (bool f : free) n += f ? 1 : 0;
  return n;
}

std::vector<Index> Patch::free_nodes() const {
  std::vector<Index> out;
  out.reserve(node_ids.size());
  for (std::size_t i = 0; i < node_ids.size(); ++i) {
    if (free[i]) out.push_back(node_ids[i]);
  }
  return out;
}

bool Patch::covers_domain(const CoarseGrid& coarse) const {
  return elements == IndexRect{0, 0, coarse.nh() - 1, coarse.nh() - 1};
}

Patch oversample(const CoarseGrid& coarse, Index j, Index m, PatchTrace trace) {
  coarse.check_element(j);
  if (m < 0) throw Error(ErrorKind::kInvalidArgument, "oversampling layers must be >= 0");

  // On a tensor grid, m closure-intersection steps grow the block by one
  // element in each direction per step.
  const Index nh = coarse.nh();
  const Index ex = coarse.element_x(j);
  const Index ey = coarse.element_y(j);
  Patch p;
  p.center = j;
  p.layers = m;
  p.elements = {std::max<Index>(0, ex - m), std::max<Index>(0, ey - m),
                std::min<Index>(nh - 1, ex + m), std::min<Index>(nh - 1, ey + m)};
  for (Index jy = p.elements.y0; jy <= p.elements.y1; ++jy) {
    for (Index jx = p.elements.x0; jx <= p.elements.x1; ++jx) {
      p.element_ids.push_back(coarse.element(jx, jy));
    }
  }

  const Index r = coarse.cells_per_element();
  const FineGrid& fine = coarse.fine();
  p.nodes = {p.elements.x0 * r, p.elements.y0 * r, (p.elements.x1 + 1) * r,
             (p.elements.y1 + 1) * r};
  p.node_ids = fine.nodes_in(p.nodes);
  p.free.assign(p.node_ids.size(), true);
  for (std::size_t i = 0; i < p.node_ids.size(); ++i) {
    const Index ix = fine.node_x(p.node_ids[i]);
    const Index iy = fine.node_y(p.node_ids[i]);
    const bool on_patch_edge =
        ix == p.nodes.x0 || ix == p.nodes.x1 || iy == p.nodes.y0 || iy == p.nodes.y1;
    if (!on_patch_edge) continue;
    if (trace == PatchTrace::kStrict) {
      p.free[i] = false;
      continue;
    }
    // Constrained iff the node lies on a patch side that is interior to the
    // domain (this includes the endpoints of such sides on the boundary).
    const bool left = ix == p.nodes.x0 && ix != 0;
    const bool right = ix == p.nodes.x1 && ix != fine.nx();
    const bool bottom = iy == p.nodes.y0 && iy != 0;
    const bool top = iy == p.nodes.y1 && iy != fine.ny();
    p.free[i] = !(left || right || bottom || top);
  }
  return p;
}

}  // namespace cemhelm
