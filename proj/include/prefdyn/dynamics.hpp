#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "prefdyn/rng.hpp"
#include "prefdyn/types.hpp"

namespace prefdyn {

/// One realized trajectory: T+1 preferences, and per step t in [0, T) the
/// recommended item index, both rewards evaluated at the pre-update
/// preference, and the (possibly noisy) affinity observation y_t.
struct TrajectoryRecord {
  std::vector<UnitVector> preferences;
  std::vector<std::size_t> recommendations;
  StepSizeSchedule schedule;
  std::vector<double> rewards_affinity;
  std::vector<double> rewards_stationarity;
  std::vector<double> observations;

  std::size_t horizon() const { return recommendations.size(); }
};

/// Phi_0 = I, Phi_{t+1} = (I + eta_t q_t q_t^T) Phi_t. The unnormalized
/// dynamics: normalize(Phi_t p_0) reproduces p_t.
struct TransferMatrixSequence {
  std::vector<Matrix> matrices;
};

/// A recommendation rule. recommend(t) is called once per step in order;
/// observe(t, y) reports the affinity observation back to rules that use it.
/// One instance per trajectory; instances are stateful and must not be
/// shared across trajectories.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::size_t recommend(std::size_t t) = 0;
  virtual void observe(std::size_t /*t*/, double /*y*/) {}
};

/// One update: normalize(p + eta (p^T q) q). When p^T q is exactly zero the
/// update direction vanishes and p is returned unchanged.
UnitVector step(const UnitVector& p, const UnitVector& q, double eta);

/// Iterates step() for T steps under the given rule, recording rewards and
/// observations y_t = p_t^T q_t + w_t with w_t ~ N(0, noise_sigma^2) when
/// noise_sigma > 0. Deterministic given the rng stream.
TrajectoryRecord simulate(const UnitVector& p0, Policy& policy,
                          const ItemCatalog& catalog,
                          const StepSizeSchedule& schedule, std::size_t T,
                          double noise_sigma, CounterRng& noise_rng);

/// gamma_t^2, the squared contraction factor of the fixed-recommendation
/// trajectory: (eta+1)^{-2t} for constant steps, and
/// prod_{k=0}^{eta-1} ((s+k)/(t+s+k))^2 for decreasing steps. Equals 1 at
/// t = 0.
double gamma_sq(const StepSizeSchedule& schedule, std::size_t t);

/// p_t^T q under fixed recommendation q, given c = p_0^T q in (0, 1]:
/// (1 + gamma_t^2 (c^{-2} - 1))^{-1/2}, the positive root.
double closed_form_affinity(double p0_dot_q, const StepSizeSchedule& schedule,
                            std::size_t t);

struct TrajectoryCoefficients {
  double alpha;
  double beta;
};

/// Coefficients (alpha_t, beta_t) with p_t = alpha_t p_0 + beta_t q under
/// fixed recommendation, for p_0^T q in (0, 1). alpha_t decreases and beta_t
/// increases with t.
TrajectoryCoefficients closed_form_coefficients(const UnitVector& p0,
                                                const UnitVector& q,
                                                const StepSizeSchedule& schedule,
                                                std::size_t t);

TransferMatrixSequence transfer_matrices(
    const std::vector<std::size_t>& recommendations, const ItemCatalog& catalog,
    const StepSizeSchedule& schedule);

// Scalar monotonicity helpers for the trajectory-coefficient tests:
// on x >= 0 with a in (0,1), f1 and f3 are increasing and f2 is decreasing.
double coeff_f1(double x, double a);
double coeff_f2(double x, double a);
double coeff_f3(double x, double a);

}  // namespace prefdyn
