#include "cemhelm/reference.hpp"

#include <cmath>

namespace cemhelm {

void ProblemSpec::validate() const {
  medium.check_matches(grid);
  if (!(k >= 0.0) || !std::isfinite(k)) {
    throw Error(ErrorKind::kInvalidArgument, "wavenumber must be finite and >= 0");
  }
  if (source.size() != grid.num_nodes() || boundary_data.size() != grid.num_nodes()) {
    throw Error(ErrorKind::kDimensionMismatch, "source/boundary data length != node count");
  }
  if (exact && exact->size() != grid.num_nodes()) {
    throw Error(ErrorKind::kDimensionMismatch, "exact field length != node count");
  }
}

ComplexVector assemble_load(const DiscreteForms& forms, const ProblemSpec& spec) {
  return load_volume(forms, spec.source) + load_boundary(forms, spec.boundary_data);
}

namespace {

ComplexSparse bordered(const ComplexSparse& a, const ComplexVector& z) {
  const Index n = a.rows();
  std::vector<Eigen::Triplet<Complex>> trips;
  trips.reserve(static_cast<std::size_t>(a.nonZeros() + 2 * n));
  for (Index c = 0; c < a.outerSize(); ++c) {
    for (ComplexSparse::InnerIterator it(a, c); it; ++it) {
      trips.emplace_back(it.row(), it.col(), it.value());
    }
  }
  for (Index i = 0; i < n; ++i) {
    if (z[i] == Complex(0.0)) continue;
    trips.emplace_back(i, n, z[i]);
    trips.emplace_back(n, i, z[i]);
  }
  ComplexSparse out(n + 1, n + 1);
  out.setFromTriplets(trips.begin(), trips.end());
  out.makeCompressed();
  return out;
}

}  // namespace

Solution solve_fine(const DiscreteForms& forms, const ComplexVector& load) {
  if (load.size() != forms.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "solve_fine: load length mismatch");
  }
  if (forms.k == 0.0) {
    // Pure Neumann: border with the mean functional, zero-mean solution.
    const ComplexVector z = (forms.mass * RealVector::Ones(forms.size())).cast<Complex>();
    ComplexVector rhs = ComplexVector::Zero(forms.size() + 1);
    rhs.head(forms.size()) = load;
    const ComplexVector x = solve(factorize(bordered(forms.helmholtz, z)), rhs);
    return {x.head(forms.size()), SolutionKind::kReference};
  }
  return {solve(factorize(forms.helmholtz), load), SolutionKind::kReference};
}

Solution solve_fine(const ProblemSpec& spec) {
  spec.validate();
  DiscreteForms forms;
  forms.k = spec.k;
  forms.stiffness = assemble_stiffness(spec.grid, spec.medium);
  forms.mass = assemble_mass(spec.grid);
  forms.boundary_mass = assemble_boundary_mass(spec.grid);
  forms.helmholtz = helmholtz_matrix(forms.stiffness, forms.mass, forms.boundary_mass, spec.k);
  return solve_fine(forms, assemble_load(forms, spec));
}

Solution solve_coarse_fem(const ProblemSpec& spec, Index nh) {
  spec.validate();
  const CoarseGrid coarse(spec.grid, nh);
  const Index r = coarse.cells_per_element();
  const FineGrid cgrid(nh, nh);

  RealVector averaged(cgrid.num_cells());
  for (Index j = 0; j < coarse.num_elements(); ++j) {
    double sum = 0.0;
    for (Index c : coarse.element_cells(j)) sum += spec.medium.cell(c);
    averaged[j] = sum / static_cast<double>(r * r);
  }
  const Medium cmedium(nh, nh, averaged);

  ProblemSpec cspec{cgrid, cmedium, spec.k, ComplexVector(cgrid.num_nodes()),
                    ComplexVector(cgrid.num_nodes()), std::nullopt};
  for (Index n = 0; n < cgrid.num_nodes(); ++n) {
    const Index fine_node = spec.grid.node(cgrid.node_x(n) * r, cgrid.node_y(n) * r);
    cspec.source[n] = spec.source[fine_node];
    cspec.boundary_data[n] = spec.boundary_data[fine_node];
  }
  const ComplexVector uc = solve_fine(cspec).values;

  ComplexVector u(spec.grid.num_nodes());
  const double inv = 1.0 / static_cast<double>(r);
  for (Index n = 0; n < spec.grid.num_nodes(); ++n) {
    const Index ix = spec.grid.node_x(n);
    const Index iy = spec.grid.node_y(n);
    const Index cx = std::min(ix / r, nh - 1);
    const Index cy = std::min(iy / r, nh - 1);
    const double tx = static_cast<double>(ix - cx * r) * inv;
    const double ty = static_cast<double>(iy - cy * r) * inv;
    u[n] = (1 - tx) * (1 - ty) * uc[cgrid.node(cx, cy)] + tx * (1 - ty) * uc[cgrid.node(cx + 1, cy)] +
           tx * ty * uc[cgrid.node(cx + 1, cy + 1)] + (1 - tx) * ty * uc[cgrid.node(cx, cy + 1)];
  }
  return {u, SolutionKind::kCoarseFem};
}

Solution plane_wave(const FineGrid& grid, double k, const Eigen::Vector2d& direction) {
  if (std::abs(direction.norm() - 1.0) > 1e-12) {
    throw Error(ErrorKind::kInvalidArgument, "plane wave direction must be a unit vector");
  }
  ComplexVector u(grid.num_nodes());
  for (Index n = 0; n < grid.num_nodes(); ++n) {
    u[n] = std::exp(Complex(0.0, k * direction.dot(grid.coords(n))));
  }
  return {u, SolutionKind::kExact};
}

ComplexVector robin_data_plane_wave(const FineGrid& grid, double k) {
  const Complex i(0.0, 1.0);
  ComplexVector g = ComplexVector::Zero(grid.num_nodes());
  for (Index n = 0; n < grid.num_nodes(); ++n) {
    const Index ix = grid.node_x(n);
    const Index iy = grid.node_y(n);
    const Eigen::Vector2d x = grid.coords(n);
    if (ix == 0) {
      g[n] = -i * 1.6 * k * std::exp(i * k * 0.8 * x.y());
    } else if (ix == grid.nx()) {
      g[n] = -i * 0.4 * k * std::exp(i * k * (0.6 + 0.8 * x.y()));
    } else if (iy == 0) {
      g[n] = -i * 1.8 * k * std::exp(i * k * 0.6 * x.x());
    } else if (iy == grid.ny()) {
      g[n] = -i * 0.2 * k * std::exp(i * k * (0.6 * x.x() + 0.8));
    }
  }
  return g;
}

ComplexVector bump_source(const FineGrid& grid) {
  ComplexVector f = ComplexVector::Zero(grid.num_nodes());
  for (Index n = 0; n < grid.num_nodes(); ++n) {
    const double r2 = grid.coords(n).squaredNorm();
    const double q = 400.0 * r2;
    if (q < 1.0) f[n] = std::exp(-1.0 / (1.0 - q));
  }
  return f;
}

ComplexVector piecewise_source(const FineGrid& grid, const RealVector& cell_values) {
  if (cell_values.size() != grid.num_cells()) {
    throw Error(ErrorKind::kDimensionMismatch, "piecewise_source: one value per cell required");
  }
  RealVector sum = RealVector::Zero(grid.num_nodes());
  RealVector count = RealVector::Zero(grid.num_nodes());
  for (Index c = 0; c < grid.num_cells(); ++c) {
    for (Index n : grid.cell_nodes(c)) {
      sum[n] += cell_values[c];
      count[n] += 1.0;
    }
  }
  return sum.cwiseQuotient(count).cast<Complex>();
}

ComplexVector piecewise_source(const FineGrid& grid, const std::filesystem::path& raster) {
  Index nx = 0, ny = 0;
  const RealVector values = load_raster_values(raster, nx, ny, false);
  if (nx != grid.nx() || ny != grid.ny()) {
    throw Error(ErrorKind::kMalformedRaster, "source raster size does not match the grid");
  }
  return piecewise_source(grid, values);
}

RealVector centered_block(const FineGrid& grid, double side) {
  RealVector v = RealVector::Zero(grid.num_cells());
  const double lo = 0.5 - 0.5 * side;
  const double hi = 0.5 + 0.5 * side;
  for (Index cy = 0; cy < grid.ny(); ++cy) {
    for (Index cx = 0; cx < grid.nx(); ++cx) {
      const double x = (static_cast<double>(cx) + 0.5) * grid.h();
      const double y = (static_cast<double>(cy) + 0.5) * grid.h();
      if (x > lo && x < hi && y > lo && y < hi) v[grid.cell(cx, cy)] = 1.0;
    }
  }
  return v;
}

}  // namespace cemhelm
