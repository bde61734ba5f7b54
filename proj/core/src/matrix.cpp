#include "csadapt/matrix.hpp"

#include <cmath>
#include <string>

#include "csadapt/errors.hpp"

namespace csadapt {

namespace {

std::string shape(const DenseMatrix& m) { return std::to_string(m.rows()) + "x" + std::to_string(m.cols()); }

}  // namespace

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul: cannot multiply " + shape(a) + " by " + shape(b));
  }
  return a * b;
}

DenseMatrix normalize_columns(const DenseMatrix& m) {
  DenseMatrix out = m;
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    const double norm = out.col(j).norm();
    if (norm == 0.0 || !std::isfinite(norm)) {
      throw DegenerateInputError("normalize_columns: column " + std::to_string(j) + " has norm " + std::to_string(norm));
    }
    out.col(j) /= norm;
  }
  return out;
}

Svd svd(const DenseMatrix& m) {
  require_finite(m, "svd");
  Eigen::BDCSVD<DenseMatrix> dec(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (dec.info() != Eigen::Success) {
    throw ConvergenceError("svd: decomposition of " + shape(m) + " did not converge");
  }
  return Svd{dec.matrixU(), dec.singularValues(), dec.matrixV()};
}

Vector least_squares(const DenseMatrix& a, const Vector& b) {
  if (a.rows() != b.size()) {
    throw DimensionError("least_squares: matrix " + shape(a) + " with right-hand side of length " +
                         std::to_string(b.size()));
  }
  return a.completeOrthogonalDecomposition().solve(b);
}

DenseMatrix pseudo_inverse(const DenseMatrix& a) {
  require_finite(a, "pseudo_inverse");
  return a.completeOrthogonalDecomposition().pseudoInverse();
}

SymmetricEigen symmetric_eigen(const DenseMatrix& m) {
  if (m.rows() != m.cols()) throw DimensionError("symmetric_eigen: matrix " + shape(m) + " is not square");
  require_finite(m, "symmetric_eigen");
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(m);
  if (es.info() != Eigen::Success) {
    throw ConvergenceError("symmetric_eigen: QR iteration on " + shape(m) + " did not converge");
  }
  // Eigen returns ascending order
  return SymmetricEigen{es.eigenvalues().reverse(), es.eigenvectors().rowwise().reverse()};
}

DenseMatrix raw_gaussian_matrix(Eigen::Index rows, Eigen::Index cols, RngSeed seed) {
  if (rows < 1 || cols < 1) {
    throw DimensionError("gaussian_matrix: shape " + std::to_string(rows) + "x" + std::to_string(cols));
  }
  Rng rng(seed);
  DenseMatrix out(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) out(i, j) = rng.normal();
  return out;
}

DenseMatrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, RngSeed seed) {
  return normalize_columns(raw_gaussian_matrix(rows, cols, seed));
}

void require_finite(const DenseMatrix& m, const char* what) {
  if (!m.allFinite()) throw DegenerateInputError(std::string(what) + ": matrix contains NaN or infinite entries");
}

}  // namespace csadapt
