#pragma once

#include <optional>

#include "cemhelm/assembly.hpp"
#include "cemhelm/solution.hpp"

namespace cemhelm {

/// One Helmholtz boundary value problem on the unit square with Robin
/// (impedance) data on the whole boundary.
struct ProblemSpec {
  FineGrid grid;
  Medium medium;
  double k = 16.0;
  ComplexVector source;         // nodal f
  ComplexVector boundary_data;  // nodal g, only boundary entries are used
  std::optional<ComplexVector> exact;

  void validate() const;
};

/// M f + M_boundary g.
ComplexVector assemble_load(const DiscreteForms& forms, const ProblemSpec& spec);

/// Solves B(k) u = load on the fine grid. With k = 0 the operator is the
/// pure Neumann stiffness; the solution is then fixed by zero mean.
Solution solve_fine(const DiscreteForms& forms, const ComplexVector& load);
Solution solve_fine(const ProblemSpec& spec);

/// Q1 solution on the NH x NH grid, interpolated onto the fine grid. The
/// coarse coefficient is the arithmetic mean of the fine cells; source and
/// boundary data are sampled at coarse nodes.
Solution solve_coarse_fem(const ProblemSpec& spec, Index nh);

/// exp(i k d . x) at the nodes.
Solution plane_wave(const FineGrid& grid, double k,
                    const Eigen::Vector2d& direction = Eigen::Vector2d(0.6, 0.8));

/// Robin data A grad u . n - i k u of the (0.6, 0.8) plane wave, edge by
/// edge; corner nodes take the left, right, bottom, top formula in that
/// order of preference.
ComplexVector robin_data_plane_wave(const FineGrid& grid, double k);

/// Smooth bump exp(-1 / (1 - 400 |x|^2)) supported in |x| < 1/20.
ComplexVector bump_source(const FineGrid& grid);

/// Nodal source from per-cell values by averaging the cells around each node.
ComplexVector piecewise_source(const FineGrid& grid, const RealVector& cell_values);
ComplexVector piecewise_source(const FineGrid& grid, const std::filesystem::path& raster);

/// Centered square block of amplitude 1 with the given side length.
RealVector centered_block(const FineGrid& grid, double side);

}  // namespace cemhelm
