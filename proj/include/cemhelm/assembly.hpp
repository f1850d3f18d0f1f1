#pragma once

#include <span>

#include "cemhelm/medium.hpp"

namespace cemhelm {

/// Exact Q1 integrals on an h x h square with constant coefficient, nodes
/// ordered counterclockwise from the bottom-left corner.
struct ElementMatrices {
  Eigen::Matrix4d stiffness;
  Eigen::Matrix4d mass;
};

ElementMatrices element_matrices(double h, double coefficient);

/// Exact P1 mass on a boundary edge of length h: (h/6) [[2,1],[1,2]].
Eigen::Matrix2d boundary_edge_mass(double h);

RealSparse assemble_stiffness(const FineGrid& grid, const Medium& medium);
RealSparse assemble_weighted_mass(const FineGrid& grid, const RealVector& cell_weights);
RealSparse assemble_mass(const FineGrid& grid);
/// Boundary mass over all of the domain boundary.
RealSparse assemble_boundary_mass(const FineGrid& grid);

/// Matrix of B(u, v) = (A grad u, grad v) - i k (u, v)_boundary - k^2 (u, v),
/// with B(u, v) = v^H B u. Complex symmetric, not Hermitian for k > 0.
ComplexSparse helmholtz_matrix(const RealSparse& stiffness, const RealSparse& mass,
                               const RealSparse& boundary_mass, double k);
ComplexSparse assemble_B(const FineGrid& grid, const Medium& medium, double k);

/// All discrete operators for one (grid, medium, weight, k) combination.
struct DiscreteForms {
  double k = 0.0;
  RealSparse stiffness;
  RealSparse mass;
  RealSparse weighted_mass;  // A-tilde weighted
  RealSparse boundary_mass;
  ComplexSparse helmholtz;

  static DiscreteForms build(const FineGrid& grid, const Medium& medium,
                             const RealVector& stilde, double k);
  Index size() const { return stiffness.rows(); }
};

/// b = M f for a nodal source.
ComplexVector load_volume(const DiscreteForms& forms, const ComplexVector& f_nodal);
/// b = M_boundary g for nodal boundary data (interior entries ignored).
ComplexVector load_boundary(const DiscreteForms& forms, const ComplexVector& g_nodal);

/// Submatrix on `local_to_global` rows and columns, in that order.
template <typename Scalar>
Eigen::SparseMatrix<Scalar> restrict_matrix(const Eigen::SparseMatrix<Scalar>& a,
                                            std::span<const Index> local_to_global) {
  std::vector<Index> global_to_local(static_cast<std::size_t>(a.rows()), -1);
  for (std::size_t i = 0; i < local_to_global.size(); ++i) {
    global_to_local[static_cast<std::size_t>(local_to_global[i])] = static_cast<Index>(i);
  }
  const Index n = static_cast<Index>(local_to_global.size());
  std::vector<Eigen::Triplet<Scalar>> trips;
  for (Index lc = 0; lc < n; ++lc) {
    const Index gc = local_to_global[static_cast<std::size_t>(lc)];
    for (typename Eigen::SparseMatrix<Scalar>::InnerIterator it(a, gc); it; ++it) {
      const Index lr = global_to_local[static_cast<std::size_t>(it.row())];
      if (lr >= 0) trips.emplace_back(lr, lc, it.value());
    }
  }
  Eigen::SparseMatrix<Scalar> out(n, n);
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Derived::ColsAtCompileTime>
restrict_rows(const Eigen::MatrixBase<Derived>& v, std::span<const Index> local_to_global) {
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Derived::ColsAtCompileTime> out(
      static_cast<Index>(local_to_global.size()), v.cols());
  for (std::size_t i = 0; i < local_to_global.size(); ++i) {
    out.row(static_cast<Index>(i)) = v.row(local_to_global[i]);
  }
  return out;
}

/// Extension by zero of local rows back to `global_size` rows.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Derived::ColsAtCompileTime>
prolong_rows(const Eigen::MatrixBase<Derived>& v, std::span<const Index> local_to_global,
             Index global_size) {
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Derived::ColsAtCompileTime> out =
      Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic,
                    Derived::ColsAtCompileTime>::Zero(global_size, v.cols());
  for (std::size_t i = 0; i < local_to_global.size(); ++i) {
    out.row(local_to_global[i]) = v.row(static_cast<Index>(i));
  }
  return out;
}

}  // namespace cemhelm
