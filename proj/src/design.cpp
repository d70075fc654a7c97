#include "prefdyn/design.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <utility>

#include "prefdyn/rng.hpp"

namespace prefdyn {

namespace {

constexpr double kFeasibilityTol = 1e-6;
constexpr double kDominanceTol = -1e-9;

// Columns of the eigenvector equation: (q_i^T v) q_i.
Matrix eig_system_matrix(const ItemCatalog& catalog, const UnitVector& v) {
  const Matrix& q = catalog.matrix();
  const Vector scales = q.transpose() * v.vec();
  return q * scales.asDiagonal();
}

std::vector<std::size_t> support_of(const Vector& x) {
  std::vector<std::size_t> support;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0) support.push_back(static_cast<std::size_t>(i));
  }
  return support;
}

// Recompute every reported field of a DesignSolution from x alone.
std::optional<DesignSolution> certify(const ItemCatalog& catalog,
                                      const UnitVector& v, Vector x) {
  x = x.cwiseMax(0.0);
  const Matrix a = eig_system_matrix(catalog, v);
  const double residual = (a * x - v.vec()).norm();
  if (residual > kFeasibilityTol) return std::nullopt;

  DesignSolution solution;
  solution.x = x;
  const double total = x.sum();
  solution.alpha = x / total;
  solution.lambda1 = 1.0 / total;
  solution.residual = residual;
  solution.dominant = check_dominance(catalog, x);
  const Matrix& q = catalog.matrix();
  const Matrix sigma = q * solution.alpha.asDiagonal() * q.transpose();
  const SymmetricEigResult eig = symmetric_eig(sigma);
  solution.eigengap = catalog.dim() >= 2
                          ? eig.eigenvalues[0] - eig.eigenvalues[1]
                          : eig.eigenvalues[0];
  const std::vector<std::size_t> support = support_of(x);
  solution.self_aligned_support =
      !support.empty() && self_aligned_check(catalog, support, v);
  return solution;
}

}  // namespace

SignedCatalog build_signed_catalog(const ItemCatalog& catalog,
                                   const UnitVector& v) {
  if (catalog.dim() != v.dim()) {
    throw DimensionMismatchError("signed catalog: dimension mismatch");
  }
  std::vector<UnitVector> items;
  std::vector<bool> flips;
  items.reserve(catalog.size());
  flips.reserve(catalog.size());
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    const UnitVector& q = catalog.item(i);
    const bool flip = q.dot(v) < 0.0;  // sgn(0) = +1
    items.push_back(flip ? UnitVector(Vector(-q.vec())) : q);
    flips.push_back(flip);
  }
  return SignedCatalog{ItemCatalog(std::move(items)), std::move(flips)};
}

DesignSolution solve_eig_feasibility(const ItemCatalog& catalog,
                                     const UnitVector& v) {
  const Matrix a = eig_system_matrix(catalog, v);
  const NnlsResult fit = nnls(a, v.vec());
  auto solution = certify(catalog, v, fit.x);
  if (!solution) {
    throw InfeasibleError("target is outside the conical hull of the signed "
                          "catalog (residual " +
                              std::to_string(fit.residual) + ")",
                          fit.residual);
  }
  return *solution;
}

bool check_dominance(const ItemCatalog& catalog, const Vector& x) {
  if (static_cast<std::size_t>(x.size()) != catalog.size()) {
    throw DimensionMismatchError("check_dominance: weight size mismatch");
  }
  if (x.size() > 0 && x.minCoeff() < 0.0) {
    throw DomainError("check_dominance requires x >= 0");
  }
  const Matrix& q = catalog.matrix();
  const Matrix m = Matrix::Identity(catalog.dim(), catalog.dim()) -
                   q * x.asDiagonal() * q.transpose();
  const SymmetricEigResult eig = symmetric_eig(m);
  return eig.eigenvalues[eig.eigenvalues.size() - 1] >= kDominanceTol;
}

Vector conical_hull_weights(const SignedCatalog& signed_catalog,
                            const UnitVector& v) {
  const NnlsResult fit = nnls(signed_catalog.items.matrix(), v.vec());
  if (fit.residual > kFeasibilityTol) {
    throw InfeasibleError("target is outside the conical hull (residual " +
                              std::to_string(fit.residual) + ")",
                          fit.residual);
  }
  return fit.x;
}

bool gershgorin_sufficient(const SignedCatalog& signed_catalog,
                           const UnitVector& v, const Vector& w) {
  if (w.size() > 0 && w.minCoeff() < 0.0) {
    throw DomainError("gershgorin_sufficient requires w >= 0");
  }
  const std::vector<std::size_t> support = support_of(w);
  const ItemCatalog& items = signed_catalog.items;
  for (const std::size_t i : support) {
    double row_sum = 0.0;
    for (const std::size_t j : support) {
      row_sum += std::abs(items.item(i).dot(items.item(j)));
    }
    if (w[static_cast<Eigen::Index>(i)] * row_sum >
        std::abs(items.item(i).dot(v)) + 1e-9) {
      return false;
    }
  }
  return true;
}

bool weighted_covariance_condition(const SignedCatalog& signed_catalog,
                                   const UnitVector& v, const Vector& w) {
  if (w.size() > 0 && w.minCoeff() < 0.0) {
    throw DomainError("weighted_covariance_condition requires w >= 0");
  }
  const std::vector<std::size_t> support = support_of(w);
  if (support.empty()) return true;
  const Eigen::Index k = static_cast<Eigen::Index>(support.size());
  const ItemCatalog& items = signed_catalog.items;

  // diag(|q_i^T v|) - W^{1/2} G W^{1/2} on the support, the congruence
  // scaling of diag(x)^{-1} - G under w_i = x_i |q_i^T v|.
  Matrix m(k, k);
  for (std::size_t a = 0; a < support.size(); ++a) {
    const double wa = w[static_cast<Eigen::Index>(support[a])];
    const auto ia = static_cast<Eigen::Index>(a);
    for (std::size_t b = 0; b < support.size(); ++b) {
      const double wb = w[static_cast<Eigen::Index>(support[b])];
      m(ia, static_cast<Eigen::Index>(b)) =
          -std::sqrt(wa * wb) *
          items.item(support[a]).dot(items.item(support[b]));
    }
    // Diagonal becomes |q_a^T v| - w_a since q_a^T q_a = 1.
    m(ia, ia) += items.item(support[a]).dot(v);
  }
  const SymmetricEigResult eig = symmetric_eig(0.5 * (m + m.transpose()));
  return eig.eigenvalues[eig.eigenvalues.size() - 1] >= kDominanceTol;
}

double top_k_eigsum(const Matrix& a, std::size_t k) {
  if (k < 1 || static_cast<Eigen::Index>(k) > a.rows()) {
    throw BadKError("top_k_eigsum: k must lie in [1, d]");
  }
  const SymmetricEigResult eig = symmetric_eig(a);
  return eig.eigenvalues.head(static_cast<Eigen::Index>(k)).sum();
}

namespace {

// Projection of y onto {x >= 0, A x = v}, approximated by a stiff stacked
// NNLS; the equality is restored to ~1e-8, well inside the 1e-6
// certification tolerance.
Vector project_feasible(const Matrix& a, const Vector& v, const Vector& y) {
  const double mu = 1e4;  // sqrt of the equality weight
  Matrix stacked(a.rows() + y.size(), y.size());
  stacked.topRows(y.size()) = Matrix::Identity(y.size(), y.size());
  stacked.bottomRows(a.rows()) = mu * a;
  Vector rhs(a.rows() + y.size());
  rhs.head(y.size()) = y;
  rhs.tail(a.rows()) = mu * v;
  return nnls(stacked, rhs).x;
}

struct GapObjective {
  double gap;
  double merit;
  Vector gradient;  // of the penalized merit
};

GapObjective evaluate_gap(const ItemCatalog& catalog, const Vector& x,
                          double psd_penalty) {
  const Matrix& q = catalog.matrix();
  const double total = x.sum();
  const Vector alpha = x / total;
  const Matrix sigma = q * alpha.asDiagonal() * q.transpose();
  const SymmetricEigResult eig = symmetric_eig(sigma);
  const double gap = eig.eigenvalues[0] - eig.eigenvalues[1];
  const Vector u1 = eig.eigenvectors.col(0);
  const Vector u2 = eig.eigenvectors.col(1);

  const Matrix sigma_x = q * x.asDiagonal() * q.transpose();
  const SymmetricEigResult eig_x = symmetric_eig(sigma_x);
  const double violation = std::max(0.0, eig_x.eigenvalues[0] - 1.0);
  const Vector umax = eig_x.eigenvectors.col(0);

  GapObjective result;
  result.gap = gap;
  result.merit = gap - psd_penalty * violation;
  result.gradient.resize(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double c1 = q.col(j).dot(u1);
    const double c2 = q.col(j).dot(u2);
    double g = (c1 * c1 - c2 * c2 - gap) / total;
    if (violation > 0.0) {
      const double cm = q.col(j).dot(umax);
      g -= psd_penalty * cm * cm;
    }
    result.gradient[j] = g;
  }
  return result;
}

}  // namespace

DesignSolution maximize_eigengap(const ItemCatalog& catalog,
                                 const UnitVector& v,
                                 const EigengapOptions& options) {
  // Baseline; propagates InfeasibleError when there is nothing to optimize.
  const DesignSolution baseline = solve_eig_feasibility(catalog, v);
  const Matrix a = eig_system_matrix(catalog, v);

  std::optional<DesignSolution> best;
  if (baseline.dominant) best = baseline;

  for (int start = 0; start < std::max(1, options.starts); ++start) {
    Vector x = baseline.x;
    if (start > 0) {
      CounterRng rng(options.seed, static_cast<std::uint64_t>(start),
                     /*tag=*/0xDE51u);
      const Vector noise = rng.normal_vector(x.size());
      x = project_feasible(a, v.vec(),
                           (x + 0.5 * std::max(1.0, x.norm()) * noise).eval());
    }

    double step_size = options.initial_step;
    GapObjective current = evaluate_gap(catalog, x, options.psd_penalty);
    for (int iter = 0; iter < options.iterations; ++iter) {
      bool advanced = false;
      for (int halving = 0; halving < 20; ++halving) {
        const Vector candidate =
            project_feasible(a, v.vec(), (x + step_size * current.gradient).eval());
        const GapObjective trial =
            evaluate_gap(catalog, candidate, options.psd_penalty);
        if (trial.merit > current.merit + 1e-14) {
          x = candidate;
          current = trial;
          advanced = true;
          break;
        }
        step_size *= 0.5;
      }
      if (!advanced) break;
    }

    const auto certified = certify(catalog, v, x);
    if (certified && certified->dominant &&
        (!best || certified->eigengap > best->eigengap)) {
      best = certified;
    }
  }

  if (!best) {
    throw NoDominantFeasibleError(
        "no feasible weighting makes the target dominant");
  }
  return *best;
}

std::vector<std::size_t> select_self_aligned_subset(const ItemCatalog& catalog,
                                                    const UnitVector& v,
                                                    double threshold) {
  if (threshold < 0.0 || threshold >= 1.0) {
    throw DomainError("subset threshold must lie in [0, 1)");
  }
  std::vector<std::size_t> order(catalog.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t lhs, std::size_t rhs) {
                     return catalog.item(lhs).dot(v) > catalog.item(rhs).dot(v);
                   });
  constexpr double tol = -1e-12;
  std::vector<std::size_t> admitted;
  for (const std::size_t i : order) {
    if (catalog.item(i).dot(v) < threshold) continue;
    bool compatible = true;
    for (const std::size_t j : admitted) {
      if (catalog.item(i).dot(catalog.item(j)) < tol) {
        compatible = false;
        break;
      }
    }
    if (compatible) admitted.push_back(i);
  }
  if (admitted.empty()) {
    throw EmptySelectionError("no catalog item clears the alignment threshold");
  }
  std::sort(admitted.begin(), admitted.end());
  return admitted;
}

}  // namespace prefdyn
