#pragma once

#include <Eigen/Dense>

#include "csadapt/rng.hpp"

namespace csadapt {

/// Dense real matrix. Φ (M×N), Ψ (N×L) and A = ΦΨ all live in this type.
using DenseMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Standard product; throws DimensionError naming both shapes on mismatch.
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);

/// Scales every column to unit Euclidean norm.
/// Throws DegenerateInputError identifying the first zero column.
DenseMatrix normalize_columns(const DenseMatrix& m);

/// Thin singular value decomposition m = U diag(s) Vᵀ, s descending.
struct Svd {
  DenseMatrix u;
  Vector singular_values;
  DenseMatrix v;
};

Svd svd(const DenseMatrix& m);

/// Minimum-norm least-squares solution of a x ≈ b.
Vector least_squares(const DenseMatrix& a, const Vector& b);

/// Moore-Penrose pseudo-inverse, via the same decomposition as least_squares.
DenseMatrix pseudo_inverse(const DenseMatrix& a);

/// Eigenpairs of a symmetric matrix, eigenvalues in descending order.
struct SymmetricEigen {
  Vector values;
  DenseMatrix vectors;  // column i pairs with values[i]
};

SymmetricEigen symmetric_eigen(const DenseMatrix& m);

/// rows×cols i.i.d. standard normal entries, filled column by column from
/// Rng(seed), then column-normalized.
DenseMatrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, RngSeed seed);

/// Same stream as gaussian_matrix without the normalization step.
DenseMatrix raw_gaussian_matrix(Eigen::Index rows, Eigen::Index cols, RngSeed seed);

/// Throws DegenerateInputError if any entry is NaN or infinite.
void require_finite(const DenseMatrix& m, const char* what);

}  // namespace csadapt
