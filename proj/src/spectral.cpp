#include "cemhelm/spectral.hpp"

namespace cemhelm {

ElementOperators element_operators(const CoarseGrid& coarse, Index j, const Medium& medium,
                                   const RealVector& stilde) {
  const FineGrid& fine = coarse.fine();
  medium.check_matches(fine);
  if (stilde.size() != fine.num_cells()) {
    throw Error(ErrorKind::kDimensionMismatch, "element_operators: weight count mismatch");
  }
  const IndexRect rect = coarse.element_node_rect(j);
  ElementOperators ops;
  ops.nodes = fine.nodes_in(rect);
  const Index n = rect.count();
  ops.stiffness = Eigen::MatrixXd::Zero(n, n);
  ops.weighted_mass = Eigen::MatrixXd::Zero(n, n);
  const ElementMatrices unit = element_matrices(fine.h(), 1.0);
  auto local = [&](Index global) {
    return (fine.node_y(global) - rect.y0) * rect.width() + (fine.node_x(global) - rect.x0);
  };
  for (Index c : coarse.element_cells(j)) {
    const auto nodes = fine.cell_nodes(c);
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        ops.stiffness(local(nodes[a]), local(nodes[b])) += medium.cell(c) * unit.stiffness(a, b);
        ops.weighted_mass(local(nodes[a]), local(nodes[b])) += stilde[c] * unit.mass(a, b);
      }
    }
  }
  return ops;
}

AuxiliaryBasis local_eigenbasis(Index j, const ElementOperators& ops, Index l) {
  if (l < 1) throw Error(ErrorKind::kInvalidArgument, "need at least one auxiliary function");
  SymmetricEigenpairs pairs;
  try {
    pairs = generalized_sym_eig(ops.stiffness, ops.weighted_mass, l);
  } catch (const Error& e) {
    throw Error(e.kind(), "element " + std::to_string(j) + ": " + e.what());
  }
  AuxiliaryBasis b;
  b.element = j;
  b.nodes = ops.nodes;
  b.eigenvalues = std::move(pairs.values);
  b.vectors = std::move(pairs.vectors);
  b.weighted = ops.weighted_mass * b.vectors;
  b.weighted_mass = ops.weighted_mass.sparseView();
  return b;
}

AuxiliaryBasis local_eigenbasis(const CoarseGrid& coarse, Index j, const Medium& medium,
                                const RealVector& stilde, Index l) {
  return local_eigenbasis(j, element_operators(coarse, j, medium, stilde), l);
}

ProjectionOperator::ProjectionOperator(Index num_nodes, std::vector<AuxiliaryBasis> bases)
    : num_nodes_(num_nodes), per_element_(0), bases_(std::move(bases)) {
  if (!bases_.empty()) per_element_ = bases_.front().count();
  offsets_.push_back(0);
  for (const auto& b : bases_) {
    if (b.count() != per_element_) {
      throw Error(ErrorKind::kDimensionMismatch, "all elements must carry the same basis count");
    }
    offsets_.push_back(offsets_.back() + static_cast<Index>(b.nodes.size()));
  }
}

void ProjectionOperator::check_size(Index n) const {
  if (n != num_nodes_) {
    throw Error(ErrorKind::kDimensionMismatch, "projection: vector length mismatch");
  }
}

RealSparse ProjectionOperator::gram_correction() const {
  std::vector<Eigen::Triplet<double>> trips;
  for (const auto& b : bases_) {
    const Eigen::MatrixXd block = b.weighted * b.weighted.transpose();
    for (std::size_t r = 0; r < b.nodes.size(); ++r) {
      for (std::size_t c = 0; c < b.nodes.size(); ++c) {
        trips.emplace_back(b.nodes[r], b.nodes[c],
                           block(static_cast<Index>(r), static_cast<Index>(c)));
      }
    }
  }
  RealSparse out(num_nodes_, num_nodes_);
  out.setFromTriplets(trips.begin(), trips.end());
  out.makeCompressed();
  return out;
}

RealVector ProjectionOperator::rhs(Index j, Index i) const {
  if (j < 0 || j >= num_elements()) {
    throw Error(ErrorKind::kInvalidElement, "rhs: element " + std::to_string(j));
  }
  if (i < 0 || i >= per_element_) {
    throw Error(ErrorKind::kInvalidArgument, "rhs: mode " + std::to_string(i));
  }
  const auto& b = basis(j);
  RealVector r = RealVector::Zero(num_nodes_);
  for (std::size_t a = 0; a < b.nodes.size(); ++a) r[b.nodes[a]] = b.weighted(static_cast<Index>(a), i);
  return r;
}

RealSparse ProjectionOperator::weighted_columns(std::span<const Index> elements,
                                                std::span<const Index> local_nodes) const {
  std::vector<Index> global_to_local(static_cast<std::size_t>(num_nodes_), -1);
  for (std::size_t i = 0; i < local_nodes.size(); ++i) {
    global_to_local[static_cast<std::size_t>(local_nodes[i])] = static_cast<Index>(i);
  }
  std::vector<Eigen::Triplet<double>> trips;
  Index col = 0;
  for (Index j : elements) {
    const auto& b = basis(j);
    for (Index i = 0; i < b.count(); ++i, ++col) {
      for (std::size_t a = 0; a < b.nodes.size(); ++a) {
        const Index row = global_to_local[static_cast<std::size_t>(b.nodes[a])];
        if (row >= 0) trips.emplace_back(row, col, b.weighted(static_cast<Index>(a), i));
      }
    }
  }
  RealSparse out(static_cast<Index>(local_nodes.size()), col);
  out.setFromTriplets(trips.begin(), trips.end());
  out.makeCompressed();
  return out;
}

ProjectionOperator build_projection(const CoarseGrid& coarse, const Medium& medium,
                                    const RealVector& stilde, Index l, int threads) {
  std::vector<AuxiliaryBasis> bases(static_cast<std::size_t>(coarse.num_elements()));
  parallel_for(coarse.num_elements(), threads, [&](Index j) {
    bases[static_cast<std::size_t>(j)] = local_eigenbasis(coarse, j, medium, stilde, l);
  });
  return ProjectionOperator(coarse.fine().num_nodes(), std::move(bases));
}

}  // namespace cemhelm
