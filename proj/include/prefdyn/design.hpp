#pragma once

#include <cstdint>
#include <vector>

#include "prefdyn/linalg.hpp"
#include "prefdyn/policies.hpp"
#include "prefdyn/types.hpp"

namespace prefdyn {

/// The catalog with each item flipped into the closed half-space of v:
/// qbar_i = sgn(v^T q_i) q_i, with sgn(0) = +1.
struct SignedCatalog {
  ItemCatalog items;
  std::vector<bool> flips;
};

/// A nonnegative weight vector x making v an eigenvector of the induced
/// covariance, plus everything recomputed from it: alpha = x / 1^T x, the
/// eigenvalue lambda_1 = (1^T x)^{-1}, the equation residual
/// ||Q diag(Q^T v) x - v||, whether v is dominant, the certified eigengap of
/// Q diag(alpha) Q^T, and whether the support is self-aligned w.r.t. v.
/// eigengap and dominant always come from symmetric_eig, never from the
/// solver that produced x.
struct DesignSolution {
  Vector x;
  Vector alpha;
  double lambda1;
  double residual;
  bool dominant;
  double eigengap;
  bool self_aligned_support;
};

SignedCatalog build_signed_catalog(const ItemCatalog& catalog,
                                   const UnitVector& v);

/// Smallest-residual nonnegative x with Q diag(Q^T v) x = v (NNLS).
/// Feasible iff the residual is <= 1e-6; otherwise throws InfeasibleError
/// carrying the residual reached (equivalently: v lies outside the conical
/// hull of the signed catalog).
DesignSolution solve_eig_feasibility(const ItemCatalog& catalog,
                                     const UnitVector& v);

/// True iff lambda_min(I - Q diag(x) Q^T) >= -1e-9.
bool check_dominance(const ItemCatalog& catalog, const Vector& x);

/// Nonnegative w with v = sum_i w_i qbar_i, residual <= 1e-6, else
/// InfeasibleError. Relates to solve_eig_feasibility by w_i = x_i |q_i^T v|.
Vector conical_hull_weights(const SignedCatalog& signed_catalog,
                            const UnitVector& v);

/// Gershgorin sufficient condition for dominance: for every i with w_i > 0,
/// w_i * sum_{j: w_j > 0} |q_i^T q_j| <= |q_i^T v| + 1e-9.
bool gershgorin_sufficient(const SignedCatalog& signed_catalog,
                           const UnitVector& v, const Vector& w);

/// Weighted-covariance dominance test on the support I+ = {i : w_i > 0}:
/// diag(|q_i^T v|) - W^{1/2} G W^{1/2} >= -1e-9 in the smallest eigenvalue,
/// where G is the signed-catalog Gram restricted to I+ and W = diag(w).
/// This congruence-scaled form is the symmetric matrix actually equivalent
/// to check_dominance under w_i = x_i |q_i^T v|.
bool weighted_covariance_condition(const SignedCatalog& signed_catalog,
                                   const UnitVector& v, const Vector& w);

/// Sum of the k largest eigenvalues of a symmetric matrix, 1 <= k <= d.
double top_k_eigsum(const Matrix& a, std::size_t k);

struct EigengapOptions {
  int starts = 8;
  int iterations = 150;
  std::uint64_t seed = 0;
  double initial_step = 0.5;
  double psd_penalty = 8.0;
};

/// Picks weights maximizing the eigengap lambda_1 - lambda_2 of the induced
/// covariance subject to x >= 0, Q diag(Q^T v) x = v and dominance of v.
/// Multi-start projected first-order ascent: iterates move along the
/// certified eigengap gradient, are projected back onto the constraint
/// polyhedron, and carry an exact penalty on the dominance eigenvalue.
/// Every candidate (including the plain NNLS feasibility point, which seeds
/// start 0) is re-certified through symmetric_eig before comparison, so the
/// result never reports a better gap than it has, and is never worse than
/// the NNLS point. Throws InfeasibleError when the equality constraint has
/// no nonnegative solution and NoDominantFeasibleError when no candidate
/// passes check_dominance.
DesignSolution maximize_eigengap(const ItemCatalog& catalog,
                                 const UnitVector& v,
                                 const EigengapOptions& options = {});

/// Greedy self-aligned subset: visit items by q_i^T v descending (ties by
/// lowest index) and admit those with q_i^T v >= threshold that keep all
/// pairwise inner products nonnegative. The result always passes
/// self_aligned_check; throws EmptySelectionError when nothing qualifies.
std::vector<std::size_t> select_self_aligned_subset(const ItemCatalog& catalog,
                                                    const UnitVector& v,
                                                    double threshold);

}  // namespace prefdyn
