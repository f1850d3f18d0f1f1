#pragma once

#include <array>
#include <vector>

#include "cemhelm/kernels.hpp"

namespace cemhelm {

/// Inclusive rectangle of lattice indices [x0, x1] x [y0, y1].
struct IndexRect {
  Index x0 = 0, y0 = 0, x1 = -1, y1 = -1;

  Index width() const { return x1 - x0 + 1; }
  Index height() const { return y1 - y0 + 1; }
  Index count() const { return width() * height(); }
  bool contains(Index x, Index y) const { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }
  bool contains(const IndexRect& o) const {
    return o.x0 >= x0 && o.x1 <= x1 && o.y0 >= y0 && o.y1 <= y1;
  }
  IndexRect intersect(const IndexRect& o) const {
    return {std::max(x0, o.x0), std::max(y0, o.y0), std::min(x1, o.x1), std::min(y1, o.y1)};
  }
  bool empty() const { return x1 < x0 || y1 < y0; }
  friend bool operator==(const IndexRect&, const IndexRect&) = default;
};

/// Uniform quadrilateral grid on the unit square. Nodes are numbered
/// lexicographically (x fastest, origin bottom-left); cell nodes run
/// counterclockwise from the bottom-left corner.
class FineGrid {
 public:
  FineGrid(Index nx, Index ny);

  Index nx() const { return nx_; }
  Index ny() const { return ny_; }
  double h() const { return h_; }
  Index num_nodes() const { return (nx_ + 1) * (ny_ + 1); }
  Index num_cells() const { return nx_ * ny_; }

  Index node(Index ix, Index iy) const { return iy * (nx_ + 1) + ix; }
  Index cell(Index cx, Index cy) const { return cy * nx_ + cx; }
  Index node_x(Index n) const { return n % (nx_ + 1); }
  Index node_y(Index n) const { return n / (nx_ + 1); }
  Eigen::Vector2d coords(Index n) const {
    return {static_cast<double>(node_x(n)) * h_, static_cast<double>(node_y(n)) * h_};
  }
  std::array<Index, 4> cell_nodes(Index c) const;
  bool on_boundary(Index n) const;

  IndexRect all_nodes() const { return {0, 0, nx_, ny_}; }

  /// Global node ids of a node rectangle, x fastest.
  std::vector<Index> nodes_in(const IndexRect& rect) const;

 private:
  Index nx_, ny_;
  double h_;
};

FineGrid build_fine_grid(Index nx, Index ny);

/// Coarse partition of a FineGrid into NH x NH blocks of fine cells.
class CoarseGrid {
 public:
  CoarseGrid(const FineGrid& fine, Index nh);

  const FineGrid& fine() const { return fine_; }
  Index nh() const { return nh_; }
  double H() const { return 1.0 / static_cast<double>(nh_); }
  Index cells_per_element() const { return ratio_; }
  Index num_elements() const { return nh_ * nh_; }

  Index element(Index ex, Index ey) const { return ey * nh_ + ex; }
  Index element_x(Index j) const { return j % nh_; }
  Index element_y(Index j) const { return j / nh_; }

  /// Node rectangle (inclusive) covered by the closure of element j.
  IndexRect element_node_rect(Index j) const;
  std::vector<Index> element_cells(Index j) const;
  std::vector<Index> element_nodes(Index j) const;
  Index element_of_cell(Index c) const;
  bool touches_boundary(Index j) const;

  void check_element(Index j) const;

 private:
  FineGrid fine_;
  Index nh_;
  Index ratio_;
};

CoarseGrid build_coarse_grid(const FineGrid& fine, Index nh);

enum class PatchTrace {
  kInteriorOnly,  // zero trace on the patch boundary away from the domain boundary
  kStrict,        // zero trace on the whole patch boundary
};

/// Oversampled neighbourhood of a coarse element: the element grown by
/// `layers` rings of coarse elements, clipped to the domain.
struct Patch {
  Index center = 0;
  Index layers = 0;
  IndexRect elements;        // coarse element index range
  IndexRect nodes;           // fine node range
  std::vector<Index> element_ids;
  std::vector<Index> node_ids;  // nodes.count() entries, x fastest
  std::vector<bool> free;       // per entry of node_ids; false where the trace is constrained

  Index num_free() const;
  /// Global ids of unconstrained nodes, in node_ids order.
  std::vector<Index> free_nodes() const;
  bool covers_domain(const CoarseGrid& coarse) const;
};

Patch oversample(const CoarseGrid& coarse, Index j, Index m,
                 PatchTrace trace = PatchTrace::kInteriorOnly);

}  // namespace cemhelm
