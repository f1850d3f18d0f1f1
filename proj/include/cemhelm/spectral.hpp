#pragma once

#include "cemhelm/assembly.hpp"

namespace cemhelm {

/// Lowest eigenpairs of the element stiffness against the A-tilde weighted
/// mass on one coarse element, with natural boundary conditions.
struct AuxiliaryBasis {
  Index element = 0;
  std::vector<Index> nodes;  // global ids of the element's fine nodes
  RealVector eigenvalues;    // ascending
  Eigen::MatrixXd vectors;   // nodes x l, s_j-orthonormal
  Eigen::MatrixXd weighted;  // S_j * vectors
  RealSparse weighted_mass;  // S_j on the element nodes

  Index count() const { return vectors.cols(); }
};

/// Element-local stiffness and weighted mass (natural boundary).
struct ElementOperators {
  std::vector<Index> nodes;
  Eigen::MatrixXd stiffness;
  Eigen::MatrixXd weighted_mass;
};

ElementOperators element_operators(const CoarseGrid& coarse, Index j, const Medium& medium,
                                   const RealVector& stilde);

AuxiliaryBasis local_eigenbasis(Index j, const ElementOperators& ops, Index l);
AuxiliaryBasis local_eigenbasis(const CoarseGrid& coarse, Index j, const Medium& medium,
                                const RealVector& stilde, Index l);

/// The s-orthogonal projection pi = sum_j pi_j onto the auxiliary space.
class ProjectionOperator {
 public:
  ProjectionOperator(Index num_nodes, std::vector<AuxiliaryBasis> bases);

  Index num_nodes() const { return num_nodes_; }
  Index num_elements() const { return static_cast<Index>(bases_.size()); }
  Index per_element() const { return per_element_; }
  Index rank() const { return per_element_ * num_elements(); }
  const AuxiliaryBasis& basis(Index j) const { return bases_[static_cast<std::size_t>(j)]; }
  const std::vector<AuxiliaryBasis>& bases() const { return bases_; }

  /// Element-wise ("broken") fields stack one local nodal vector per
  /// element; element j occupies [offset(j), offset(j) + nodes(j).size()).
  Index broken_size() const { return offsets_.back(); }
  Index offset(Index j) const { return offsets_[static_cast<std::size_t>(j)]; }

  /// Restriction of a continuous nodal field to every element.
  template <typename Derived>
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> to_broken(
      const Eigen::MatrixBase<Derived>& v) const {
    check_size(v.size());
    Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> out(broken_size());
    for (std::size_t j = 0; j < bases_.size(); ++j) {
      const auto& nodes = bases_[j].nodes;
      for (std::size_t a = 0; a < nodes.size(); ++a) {
        out[offsets_[j] + static_cast<Index>(a)] = v[nodes[a]];
      }
    }
    return out;
  }

  /// pi applied to a broken field: on each element,
  /// pi_j v = sum_i s_j(phi_j^i, v) phi_j^i.
  template <typename Derived>
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> apply_broken(
      const Eigen::MatrixBase<Derived>& v) const {
    using Scalar = typename Derived::Scalar;
    if (v.size() != broken_size()) {
      throw Error(ErrorKind::kDimensionMismatch, "projection: broken field length mismatch");
    }
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(broken_size());
    for (std::size_t j = 0; j < bases_.size(); ++j) {
      const auto& b = bases_[j];
      const Index n = static_cast<Index>(b.nodes.size());
      const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> coeffs =
          b.weighted.transpose().template cast<Scalar>() * v.segment(offsets_[j], n);
      out.segment(offsets_[j], n) = b.vectors.template cast<Scalar>() * coeffs;
    }
    return out;
  }

  /// pi v for a continuous nodal field, returned as a broken field.
  template <typename Derived>
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> apply(
      const Eigen::MatrixBase<Derived>& v) const {
    return apply_broken(to_broken(v));
  }

  /// s(u, v) = sum_j v_j^H S_j u_j for broken fields.
  template <typename DerivedU, typename DerivedV>
  typename DerivedU::Scalar s_inner_broken(const Eigen::MatrixBase<DerivedU>& u,
                                           const Eigen::MatrixBase<DerivedV>& v) const {
    typename DerivedU::Scalar acc(0);
    for (std::size_t j = 0; j < bases_.size(); ++j) {
      const Index n = static_cast<Index>(bases_[j].nodes.size());
      acc += v.segment(offsets_[j], n).dot(
          (bases_[j].weighted_mass.template cast<typename DerivedU::Scalar>() *
           u.segment(offsets_[j], n)).eval());
    }
    return acc;
  }

  /// C with v^T C w = s(pi v, pi w): sum_j (S_j Phi_j)(S_j Phi_j)^T.
  RealSparse gram_correction() const;

  /// Global vector r with r_p = s_j(phi_j^i, chi_p), i.e. S_j phi_j^i.
  RealVector rhs(Index j, Index i) const;

  /// Columns S_j Phi_j of every element in `elements`, rows restricted to
  /// `local_nodes` (global ids). Columns ordered element-major.
  RealSparse weighted_columns(std::span<const Index> elements,
                              std::span<const Index> local_nodes) const;

 private:
  void check_size(Index n) const;

  Index num_nodes_;
  Index per_element_;
  std::vector<AuxiliaryBasis> bases_;
  std::vector<Index> offsets_;
};

ProjectionOperator build_projection(const CoarseGrid& coarse, const Medium& medium,
                                    const RealVector& stilde, Index l, int threads = 1);

}  // namespace cemhelm
