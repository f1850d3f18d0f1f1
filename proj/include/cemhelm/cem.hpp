#pragma once

#include "cemhelm/solution.hpp"
#include "cemhelm/spectral.hpp"

namespace cemhelm {

/// Solver for the constrained patch problem
///   (B + Q Q^T) x = r,
/// where Q holds the columns S_j Phi_j of the elements in the patch. The
/// rank-(N l) correction is kept out of the sparse matrix by solving the
/// equivalent augmented system [B Q; Q^T -I][x; y] = [r; 0].
class ConstrainedPatchSolver {
 public:
  ConstrainedPatchSolver(const ComplexSparse& b_free, const RealSparse& q_free);

  Index size() const { return n_; }
  /// One column per right-hand side, rows on the free patch nodes.
  Eigen::MatrixXcd solve(const Eigen::MatrixXcd& rhs) const;

 private:
  Index n_;
  Factorization<Complex> fact_;
};

/// Trial and test basis values of one coarse element, stored on the node
/// rectangle of its patch (zero outside).
struct LocalBasisSet {
  Index element = 0;
  IndexRect nodes;
  std::vector<Index> node_ids;
  Eigen::MatrixXcd trial;  // node_ids.size() x l
  Eigen::MatrixXcd test;
};

enum class TestSpaceRule {
  kConjugate,     // psi* = conj(psi)
  kAdjointSolve,  // separate solve with the adjoint local matrix
};

struct CemOptions {
  Index layers = 1;
  PatchTrace trace = PatchTrace::kInteriorOnly;
  TestSpaceRule test_rule = TestSpaceRule::kConjugate;
  int threads = 1;
};

class MultiscaleSpace {
 public:
  MultiscaleSpace(Index num_nodes, Index layers, Index per_element,
                  std::vector<LocalBasisSet> sets);

  Index num_nodes() const { return num_nodes_; }
  Index layers() const { return layers_; }
  Index per_element() const { return per_element_; }
  Index num_elements() const { return static_cast<Index>(sets_.size()); }
  Index size() const { return per_element_ * num_elements(); }
  /// Coefficient index of basis (j, i).
  Index index(Index j, Index i) const { return j * per_element_ + i; }
  const LocalBasisSet& set(Index j) const { return sets_[static_cast<std::size_t>(j)]; }

  ComplexVector trial(Index p) const;
  ComplexVector test(Index p) const;
  /// sum_p c_p psi_p on the fine grid.
  ComplexVector expand(const ComplexVector& coefficients) const;

 private:
  Index num_nodes_;
  Index layers_;
  Index per_element_;
  std::vector<LocalBasisSet> sets_;
};

/// Trial (or, with `adjoint`, test) bases of the patch's center element:
/// B(x, v) + s(pi x, pi v) = s(pi_j phi_j^i, pi v) for v vanishing on the
/// constrained patch boundary. Returns values on `patch.node_ids`.
Eigen::MatrixXcd local_cem_solve(const DiscreteForms& forms, const ProjectionOperator& projection,
                                 const Patch& patch, bool adjoint = false);

/// Non-localized basis T_j phi_j^i on the whole domain (all l modes of j).
Eigen::MatrixXcd global_basis(const CoarseGrid& coarse, const DiscreteForms& forms,
                              const ProjectionOperator& projection, Index j,
                              bool adjoint = false);

MultiscaleSpace build_space(const CoarseGrid& coarse, const DiscreteForms& forms,
                            const ProjectionOperator& projection, const CemOptions& options);

/// Petrov-Galerkin system G c = b with G[p, q] = B(psi_q, psi*_p) and
/// b[p] = (F, psi*_p) for the assembled load F.
///
/// With k = 0 the form is the pure Neumann stiffness and the system is
/// bordered by the zero-mean constraint on u_ms: `mean_row[q]` is the mean
/// functional applied to psi_q, `mean_column[p]` the same for conj(psi*_p).
struct CoarseSystem {
  ComplexSparse matrix;
  ComplexVector rhs;
  ComplexVector mean_row;
  ComplexVector mean_column;

  bool gauged() const { return mean_row.size() > 0; }
};

CoarseSystem assemble_coarse(const MultiscaleSpace& space, const DiscreteForms& forms,
                             const ComplexVector& load, int threads = 1);

struct MultiscaleResult {
  ComplexVector coefficients;
  Solution solution;
};

/// Solves the coarse system (dense LU up to 2000 unknowns, sparse LU
/// beyond) and expands the coefficients on the fine grid.
MultiscaleResult solve_multiscale(const CoarseSystem& system, const MultiscaleSpace& space);

/// Tail energies of the global basis outside growing patches.
struct DecayReport {
  std::vector<Index> layers;
  std::vector<double> tail_energy;
  double beta_hat = 0.0;    // geometric mean of consecutive ratios
  double r_squared = 0.0;   // of the least-squares line through log t(m)
  double slope = 0.0;
};

/// t(m) = |T_j phi|^2_{a(Omega \ K_j^m)} + |pi T_j phi|^2_{s(Omega \ K_j^m)}.
double tail_energy(const CoarseGrid& coarse, const Medium& medium,
                   const ProjectionOperator& projection, const ComplexVector& field,
                   const Patch& patch);

DecayReport measure_decay(const CoarseGrid& coarse, const Medium& medium,
                          const DiscreteForms& forms, const ProjectionOperator& projection,
                          Index j, Index i, const std::vector<Index>& layers);

}  // namespace cemhelm
