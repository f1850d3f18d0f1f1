#include "cemhelm/kernels.hpp"

#include <algorithm>
#include <iostream>
#include <mutex>

namespace cemhelm {

namespace {

void stderr_sink(std::string_view message) { std::cerr << "WARN " << message << '\n'; }

WarningSink g_sink = &stderr_sink;
std::mutex g_sink_mutex;

}  // namespace

void set_warning_sink(WarningSink sink) {
  std::lock_guard lock(g_sink_mutex);
  g_sink = sink ? sink : &stderr_sink;
}

void warn(std::string_view message) {
  std::lock_guard lock(g_sink_mutex);
  g_sink(message);
}

int default_thread_count() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

SymmetricEigenpairs generalized_sym_eig(const Eigen::MatrixXd& k, const Eigen::MatrixXd& s,
                                        Index count) {
  const Index n = k.rows();
  if (k.cols() != n || s.rows() != n || s.cols() != n) {
    throw Error(ErrorKind::kDimensionMismatch, "generalized_sym_eig: K and S shapes differ");
  }
  if (count < 0 || count > n) {
    throw Error(ErrorKind::kInvalidArgument,
                "generalized_sym_eig: count " + std::to_string(count) + " exceeds dimension " +
                    std::to_string(n));
  }
  Eigen::LLT<Eigen::MatrixXd> chol(s);
  if (chol.info() != Eigen::Success || !(chol.matrixLLT().diagonal().array() > 0.0).all()) {
    throw Error(ErrorKind::kNotPositiveDefinite, "generalized_sym_eig: S is not positive definite");
  }

  // Reduce to the standard problem L^{-1} K L^{-T} y = lambda y.
  Eigen::MatrixXd c = chol.matrixL().solve(k);
  c = chol.matrixL().solve(c.transpose()).transpose();
  c = 0.5 * (c + c.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorKind::kNotPositiveDefinite, "generalized_sym_eig: eigensolver failed");
  }

  SymmetricEigenpairs out;
  out.values = eig.eigenvalues().head(count);
  out.vectors = chol.matrixU().solve(eig.eigenvectors().leftCols(count));
  for (Index i = 0; i < count; ++i) {
    Index arg = 0;
    out.vectors.col(i).cwiseAbs().maxCoeff(&arg);
    if (out.vectors(arg, i) < 0.0) out.vectors.col(i) *= -1.0;
  }
  return out;
}

}  // namespace cemhelm
