#pragma once

#include <cstdint>
#include <vector>

#include "prefdyn/dynamics.hpp"
#include "prefdyn/types.hpp"

namespace prefdyn {

/// A fixed recommendation sequence together with its catalog, schedule and
/// cached transfer matrices; the deterministic part of the observation map.
class ObservationPlan {
 public:
  ObservationPlan(std::vector<std::size_t> recommendations, ItemCatalog catalog,
                  StepSizeSchedule schedule);

  std::size_t horizon() const { return recommendations_.size(); }
  const std::vector<std::size_t>& recommendations() const {
    return recommendations_;
  }
  const ItemCatalog& catalog() const { return catalog_; }
  const StepSizeSchedule& schedule() const { return schedule_; }
  const TransferMatrixSequence& transfer() const { return transfer_; }

 private:
  std::vector<std::size_t> recommendations_;
  ItemCatalog catalog_;
  StepSizeSchedule schedule_;
  TransferMatrixSequence transfer_;
};

/// The noiseless observation sequence y_t = q_t^T Phi_t p / ||Phi_t p||,
/// t in [0, T). Agrees with a noiseless simulate() run. The raw overload
/// accepts any nonzero p (the map is scale invariant), which is what the
/// finite-difference checks differentiate.
Vector observation_map(const ObservationPlan& plan, const UnitVector& p0);
Vector observation_map_raw(const ObservationPlan& plan, const Vector& p);

/// T x d Jacobian of the observation map at p0. Row t is
///   (1/||Phi_t p0||) (I - Phi_t^T Phi_t p0 p0^T / ||Phi_t p0||^2) Phi_t^T q_t,
/// the gradient of y_t; p0 is always in its nullspace.
Matrix observation_jacobian(const ObservationPlan& plan, const UnitVector& p0);

/// Deterministic orthonormal basis of the tangent space at p: the last d-1
/// columns of the Householder reflection mapping e_1 onto -sgn(p_1) p.
Matrix tangent_basis(const UnitVector& p);

struct InvertibilityReport {
  Matrix jacobian;
  double tangent_min_singular;
  bool locally_invertible;  // tangent_min_singular > 1e-8
  double radial_residual;   // ||J p0||, always ~0
};

/// Local invertibility of the observation map at p0: the smallest singular
/// value of the Jacobian restricted to the tangent space at p0 must exceed
/// 1e-8. Spanning recommendation sequences always pass.
InvertibilityReport local_invertibility_check(const ObservationPlan& plan,
                                              const UnitVector& p0);

struct EstimateOptions {
  int max_iterations = 200;
  double gradient_tol = 1e-10;
  /// Additional antipodal pairs of random starts besides the supplied init.
  int extra_start_pairs = 0;
  std::uint64_t seed = 0;
};

struct EstimateResult {
  UnitVector estimate;
  double residual;   // ||F(p_hat) - y||
  double grad_norm;  // tangent gradient norm at p_hat
  int iterations;
  bool converged;
};

/// Recovers the initial preference from affinity observations by minimizing
/// (1/2)||F(p) - y||^2 over the sphere: Gauss-Newton in the tangent space
/// with normalization retraction and backtracking on the objective. In the
/// noiseless, locally invertible case with init^T p0 >= 0.9 the minimizer
/// is p0 itself and the returned estimate matches it to 1e-6. A failed line
/// search or hitting the iteration cap returns the best iterate with
/// converged = false.
EstimateResult estimate_initial_preference(const ObservationPlan& plan,
                                           const Vector& observations,
                                           const UnitVector& init,
                                           const EstimateOptions& options = {});

}  // namespace prefdyn
