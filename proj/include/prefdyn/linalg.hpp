#pragma once

#include "prefdyn/types.hpp"

namespace prefdyn {

/// Eigendecomposition of a real symmetric matrix with a fixed presentation:
/// eigenvalues sorted descending, eigenvector i in column i, and each
/// eigenvector oriented so its largest-magnitude coordinate is positive
/// (ties broken by lowest index). Two calls on equal inputs give
/// bit-identical results.
struct SymmetricEigResult {
  Vector eigenvalues;
  Matrix eigenvectors;
};

/// Throws NotSymmetricError when max |A - A^T| entry exceeds 1e-10.
SymmetricEigResult symmetric_eig(const Matrix& a);

struct NnlsResult {
  Vector x;
  double residual;  // ||A x - b||_2
};

/// Nonnegative least squares min ||A x - b|| s.t. x >= 0, Lawson-Hanson
/// active set. Deterministic: the entering column is the one with the
/// largest dual value, lowest index on ties; rank-deficient passive-set
/// solves take the minimum-norm solution, so the output is the minimum-norm
/// optimizer when the problem is degenerate.
NnlsResult nnls(const Matrix& a, const Vector& b);

}  // namespace prefdyn
