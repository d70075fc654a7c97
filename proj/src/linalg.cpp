#include "prefdyn/linalg.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace prefdyn {

SymmetricEigResult symmetric_eig(const Matrix& a) {
  if (a.rows() != a.cols()) {
    throw NotSymmetricError("matrix is not square");
  }
  const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10) {
    throw NotSymmetricError("matrix asymmetry " + std::to_string(asym) +
                            " exceeds 1e-10");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a);
  if (solver.info() != Eigen::Success) {
    throw Error("symmetric eigendecomposition failed to converge");
  }
  const Eigen::Index d = a.rows();
  SymmetricEigResult result;
  result.eigenvalues.resize(d);
  result.eigenvectors.resize(d, d);
  // Eigen reports ascending order; flip to descending and fix signs so the
  // largest-magnitude coordinate (lowest index on ties) is positive.
  for (Eigen::Index i = 0; i < d; ++i) {
    const Eigen::Index src = d - 1 - i;
    result.eigenvalues[i] = solver.eigenvalues()[src];
    Vector v = solver.eigenvectors().col(src);
    Eigen::Index pivot = 0;
    for (Eigen::Index j = 1; j < d; ++j) {
      if (std::abs(v[j]) > std::abs(v[pivot])) pivot = j;
    }
    if (v[pivot] < 0.0) v = -v;
    result.eigenvectors.col(i) = v;
  }
  return result;
}

namespace {

// Minimum-norm least squares on the passive columns.
Vector passive_solve(const Matrix& a, const Vector& b,
                     const std::vector<Eigen::Index>& passive) {
  Matrix ap(a.rows(), static_cast<Eigen::Index>(passive.size()));
  for (std::size_t j = 0; j < passive.size(); ++j) {
    ap.col(static_cast<Eigen::Index>(j)) = a.col(passive[j]);
  }
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(ap);
  return cod.solve(b);
}

}  // namespace

NnlsResult nnls(const Matrix& a, const Vector& b) {
  if (a.rows() != b.size()) {
    throw DimensionMismatchError("nnls: A has " + std::to_string(a.rows()) +
                                 " rows but b has " + std::to_string(b.size()) +
                                 " entries");
  }
  const Eigen::Index n = a.cols();
  Vector x = Vector::Zero(n);
  std::vector<bool> in_passive(static_cast<std::size_t>(n), false);
  std::vector<Eigen::Index> passive;

  const double dual_tol =
      1e-11 * std::max(1.0, (a.transpose() * b).cwiseAbs().maxCoeff());
  const int max_outer = 3 * static_cast<int>(n) + 10;

  for (int outer = 0; outer < max_outer; ++outer) {
    const Vector w = a.transpose() * (b - a * x);
    // Entering column: largest dual among the zero set, lowest index on ties.
    Eigen::Index enter = -1;
    double best = dual_tol;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!in_passive[static_cast<std::size_t>(j)] && w[j] > best) {
        best = w[j];
        enter = j;
      }
    }
    if (enter < 0) break;
    in_passive[static_cast<std::size_t>(enter)] = true;
    passive.push_back(enter);
    std::sort(passive.begin(), passive.end());

    for (int inner = 0; inner < max_outer; ++inner) {
      const Vector z = passive_solve(a, b, passive);
      double min_z = z.size() > 0 ? z.minCoeff() : 1.0;
      if (min_z > 0.0) {
        x.setZero();
        for (std::size_t j = 0; j < passive.size(); ++j) {
          x[passive[j]] = z[static_cast<Eigen::Index>(j)];
        }
        break;
      }
      // Step toward z until the first passive coordinate hits zero.
      double alpha = 1.0;
      for (std::size_t j = 0; j < passive.size(); ++j) {
        const double zj = z[static_cast<Eigen::Index>(j)];
        if (zj <= 0.0) {
          const double xj = x[passive[j]];
          const double candidate = xj / (xj - zj);
          alpha = std::min(alpha, candidate);
        }
      }
      for (std::size_t j = 0; j < passive.size(); ++j) {
        const double zj = z[static_cast<Eigen::Index>(j)];
        x[passive[j]] += alpha * (zj - x[passive[j]]);
      }
      // Drop coordinates pinned at zero.
      std::vector<Eigen::Index> kept;
      for (const Eigen::Index j : passive) {
        if (x[j] <= 1e-14) {
          x[j] = 0.0;
          in_passive[static_cast<std::size_t>(j)] = false;
        } else {
          kept.push_back(j);
        }
      }
      passive = std::move(kept);
      if (passive.empty()) break;
    }
  }

  NnlsResult result;
  result.x = x;
  result.residual = (a * x - b).norm();
  return result;
}

}  // namespace prefdyn
