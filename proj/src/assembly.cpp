#include "cemhelm/assembly.hpp"

namespace cemhelm {

ElementMatrices element_matrices(double h, double coefficient) {
  if (!(h > 0.0) || !(coefficient > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "element matrices need h > 0 and a > 0");
  }
  ElementMatrices e;
  // Stiffness of bilinears on a square is independent of h in 2D.
  e.stiffness << 4, -1, -2, -1,
                 -1, 4, -1, -2,
                 -2, -1, 4, -1,
                 -1, -2, -1, 4;
  e.stiffness *= coefficient / 6.0;
  e.mass << 4, 2, 1, 2,
            2, 4, 2, 1,
            1, 2, 4, 2,
            2, 1, 2, 4;
  e.mass *= h * h / 36.0;
  return e;
}

Eigen::Matrix2d boundary_edge_mass(double h) {
  Eigen::Matrix2d m;
  m << 2, 1, 1, 2;
  return m * (h / 6.0);
}

namespace {

RealSparse scatter_cells(const FineGrid& grid, const Eigen::Matrix4d& local,
                         const RealVector& cell_scale) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(16 * grid.num_cells()));
  for (Index c = 0; c < grid.num_cells(); ++c) {
    const auto nodes = grid.cell_nodes(c);
    const double s = cell_scale[c];
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) trips.emplace_back(nodes[a], nodes[b], s * local(a, b));
    }
  }
  RealSparse out(grid.num_nodes(), grid.num_nodes());
  out.setFromTriplets(trips.begin(), trips.end());
  out.makeCompressed();
  return out;
}

}  // namespace

RealSparse assemble_stiffness(const FineGrid& grid, const Medium& medium) {
  medium.check_matches(grid);
  return scatter_cells(grid, element_matrices(grid.h(), 1.0).stiffness, medium.values());
}

RealSparse assemble_weighted_mass(const FineGrid& grid, const RealVector& cell_weights) {
  if (cell_weights.size() != grid.num_cells()) {
    throw Error(ErrorKind::kDimensionMismatch, "weighted mass: one weight per cell required");
  }
  if (!(cell_weights.array() > 0.0).all() || !cell_weights.allFinite()) {
    throw Error(ErrorKind::kInvalidArgument, "weighted mass: weights must be positive");
  }
  return scatter_cells(grid, element_matrices(grid.h(), 1.0).mass, cell_weights);
}

RealSparse assemble_mass(const FineGrid& grid) {
  return assemble_weighted_mass(grid, RealVector::Ones(grid.num_cells()));
}

RealSparse assemble_boundary_mass(const FineGrid& grid) {
  const Eigen::Matrix2d e = boundary_edge_mass(grid.h());
  std::vector<Eigen::Triplet<double>> trips;
  auto add_edge = [&](Index a, Index b) {
    trips.emplace_back(a, a, e(0, 0));
    trips.emplace_back(a, b, e(0, 1));
    trips.emplace_back(b, a, e(1, 0));
    trips.emplace_back(b, b, e(1, 1));
  };
  const Index nx = grid.nx();
  const Index ny = grid.ny();
  for (Index i = 0; i < nx; ++i) {
    add_edge(grid.node(i, 0), grid.node(i + 1, 0));
    add_edge(grid.node(i, ny), grid.node(i + 1, ny));
  }
  for (Index i = 0; i < ny; ++i) {
    add_edge(grid.node(0, i), grid.node(0, i + 1));
    add_edge(grid.node(nx, i), grid.node(nx, i + 1));
  }
  RealSparse out(grid.num_nodes(), grid.num_nodes());
  out.setFromTriplets(trips.begin(), trips.end());
  out.makeCompressed();
  return out;
}

ComplexSparse helmholtz_matrix(const RealSparse& stiffness, const RealSparse& mass,
                               const RealSparse& boundary_mass, double k) {
  if (k < 0.0) throw Error(ErrorKind::kInvalidArgument, "wavenumber must be >= 0");
  const Complex robin(0.0, -k);
  ComplexSparse b = stiffness.cast<Complex>() + robin * boundary_mass.cast<Complex>() -
                    Complex(k * k, 0.0) * mass.cast<Complex>();
  b.prune(Complex(0.0, 0.0), 0.0);
  b.makeCompressed();
  return b;
}

ComplexSparse assemble_B(const FineGrid& grid, const Medium& medium, double k) {
  return helmholtz_matrix(assemble_stiffness(grid, medium), assemble_mass(grid),
                          assemble_boundary_mass(grid), k);
}

DiscreteForms DiscreteForms::build(const FineGrid& grid, const Medium& medium,
                                   const RealVector& stilde, double k) {
  DiscreteForms f;
  f.k = k;
  f.stiffness = assemble_stiffness(grid, medium);
  f.mass = assemble_mass(grid);
  f.weighted_mass = assemble_weighted_mass(grid, stilde);
  f.boundary_mass = assemble_boundary_mass(grid);
  f.helmholtz = helmholtz_matrix(f.stiffness, f.mass, f.boundary_mass, k);
  return f;
}

ComplexVector load_volume(const DiscreteForms& forms, const ComplexVector& f_nodal) {
  if (f_nodal.size() != forms.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "load_volume: source length mismatch");
  }
  return forms.mass.cast<Complex>() * f_nodal;
}

ComplexVector load_boundary(const DiscreteForms& forms, const ComplexVector& g_nodal) {
  if (g_nodal.size() != forms.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "load_boundary: data length mismatch");
  }
  // Interior rows and columns of the boundary mass are empty, so interior
  // entries of g never contribute.
  return forms.boundary_mass.cast<Complex>() * g_nodal;
}

}  // namespace cemhelm
