#pragma once

#include <complex>
#include <memory>
#include <thread>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "cemhelm/error.hpp"

namespace cemhelm {

using Index = Eigen::Index;
using Complex = std::complex<double>;

using RealSparse = Eigen::SparseMatrix<double>;
using ComplexSparse = Eigen::SparseMatrix<Complex>;
using RealVector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;

/// Sparse direct factorization (supernodal LU) that can be reused for many
/// right-hand sides. Immutable once constructed; solves are const.
template <typename Scalar>
class Factorization {
 public:
  using Matrix = Eigen::SparseMatrix<Scalar>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Dense = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  explicit Factorization(const Matrix& a) : lu_(std::make_shared<Solver>()) {
    if (a.rows() != a.cols()) {
      throw Error(ErrorKind::kDimensionMismatch, "factorize: matrix is not square");
    }
    Matrix compressed = a;
    compressed.makeCompressed();
    lu_->analyzePattern(compressed);
    lu_->factorize(compressed);
    if (lu_->info() != Eigen::Success) {
      throw Error(ErrorKind::kSingularMatrix, "factorize: " + lu_->lastErrorMessage());
    }
    // SparseLU only reports exact zero pivots; catch numerically singular ones too.
    if (a.rows() > 0 && !std::isfinite(std::real(lu_->logAbsDeterminant()))) {
      throw Error(ErrorKind::kSingularMatrix, "factorize: zero pivot");
    }
    size_ = a.rows();
  }

  Index size() const { return size_; }

  template <typename Rhs>
  Dense solve(const Eigen::MatrixBase<Rhs>& b) const {
    if (b.rows() != size_) {
      throw Error(ErrorKind::kDimensionMismatch, "solve: right-hand side length " +
                                                     std::to_string(b.rows()) + " != " +
                                                     std::to_string(size_));
    }
    Dense x = lu_->solve(b.template cast<Scalar>());
    if (!x.allFinite()) {
      throw Error(ErrorKind::kSingularMatrix, "solve: non-finite solution");
    }
    return x;
  }

 private:
  using Solver = Eigen::SparseLU<Matrix, Eigen::COLAMDOrdering<int>>;
  std::shared_ptr<Solver> lu_;
  Index size_ = 0;
};

template <typename Scalar>
Factorization<Scalar> factorize(const Eigen::SparseMatrix<Scalar>& a) {
  return Factorization<Scalar>(a);
}

template <typename Scalar, typename Rhs>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> solve(const Factorization<Scalar>& fact,
                                               const Eigen::MatrixBase<Rhs>& b) {
  return fact.solve(b).col(0);
}

struct SymmetricEigenpairs {
  RealVector values;       // ascending
  Eigen::MatrixXd vectors;  // columns, S-orthonormal
};

/// First `count` eigenpairs of K v = lambda S v with K symmetric and S SPD,
/// solved densely. Each eigenvector's sign is fixed so that its largest
/// magnitude entry is positive.
SymmetricEigenpairs generalized_sym_eig(const Eigen::MatrixXd& k, const Eigen::MatrixXd& s,
                                        Index count);

/// Runs `body(i)` for i in [0, n) on up to `threads` workers. Callers write
/// only to slot i, so results do not depend on the worker count.
template <typename Body>
void parallel_for(Index n, int threads, Body&& body) {
  if (threads <= 1 || n <= 1) {
    for (Index i = 0; i < n; ++i) body(i);
    return;
  }
  const Index workers = std::min<Index>(threads, n);
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  pool.reserve(static_cast<std::size_t>(workers));
  for (Index w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (Index i = w; i < n; i += workers) body(i);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

int default_thread_count();

}  // namespace cemhelm
