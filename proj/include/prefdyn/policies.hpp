#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "prefdyn/dynamics.hpp"
#include "prefdyn/linalg.hpp"

namespace prefdyn {

/// A probability weighting alpha over catalog items (alpha_i >= 0, summing
/// to 1 within 1e-12) together with the catalog it refers to. The induced
/// recommendation covariance is Sigma = sum_i alpha_i q_i q_i^T.
class ProbabilityWeighting {
 public:
  ProbabilityWeighting(Vector alpha, ItemCatalog catalog);

  const Vector& alpha() const { return alpha_; }
  const ItemCatalog& catalog() const { return catalog_; }
  Matrix covariance() const;

 private:
  Vector alpha_;
  ItemCatalog catalog_;
};

class FixedPolicy : public Policy {
 public:
  FixedPolicy(std::size_t index, const ItemCatalog& catalog);
  std::size_t recommend(std::size_t) override { return index_; }

 private:
  std::size_t index_;
};

inline FixedPolicy fixed_policy(std::size_t index, const ItemCatalog& catalog) {
  return FixedPolicy(index, catalog);
}

/// i.i.d. categorical draws per step from alpha. Deterministic given the
/// rng stream; a one-hot alpha reproduces FixedPolicy exactly.
class RandomizedPolicy : public Policy {
 public:
  RandomizedPolicy(ProbabilityWeighting weighting, CounterRng rng);
  std::size_t recommend(std::size_t t) override;

 private:
  ProbabilityWeighting weighting_;
  CounterRng rng_;
};

struct EtcConfig {
  std::size_t i1;
  std::size_t i2;
  std::size_t exploration_steps;  // T_e
  std::size_t horizon;            // T
  double sigma;
  double gap;  // a: min of |p_0^T q_1|, |p_0^T q_2|, |q_1^T q_2|
};

/// Explore-then-commit hemisphere identification. Picks q_e uniformly from
/// {i1, i2} (seeded), plays it for t < T_e while accumulating S = sum y_t,
/// then commits to q_e when S >= 0 and to the other item otherwise.
/// Requires q_1^T q_2 < 0.
class EtcPolicy : public Policy {
 public:
  EtcPolicy(const EtcConfig& config, const ItemCatalog& catalog,
            CounterRng rng);

  std::size_t recommend(std::size_t t) override;
  void observe(std::size_t t, double y) override;

  std::size_t explored_index() const { return explored_; }
  /// Valid once t has reached T_e.
  std::optional<std::size_t> committed_index() const { return committed_; }

 private:
  EtcConfig config_;
  std::size_t explored_;
  std::size_t other_;
  double running_sum_ = 0.0;
  std::optional<std::size_t> committed_;
};

/// ceil(sigma^2 log(T) / a^2), at least 1.
std::size_t etc_exploration_length(double sigma, double gap, std::size_t T);

/// High-probability convergence certificate for randomized recommendations:
/// the dominant eigenvector v_1 of Sigma, the spread bound
/// M = max(max_j ||q_j q_j^T - Sigma||_2, lambda_1), and the step-size
/// requirements eta >= 8/(lambda_1 - lambda_2) and
/// s >= 1 + 2 C^2 eta^2 M^2 log(2 C M T eta / delta) with C = 175 evaluated
/// at eta = eta_min. With probability 1 - delta the deviation
/// 1 - (p_t^T v_1)^2 stays below bound_at(t) = 4 e^2 (s+2)/(s+1+t) for all
/// t <= T.
///
/// s_min is astronomically large for small eigengaps; with_schedule()
/// rebinds the bound to the s actually used and records whether the
/// schedule meets the requirements (verified).
struct ConvergenceCertificate {
  UnitVector v1;
  double lambda1;
  double lambda2;
  double spread_bound;  // M
  double eta_min;
  double s_min;
  double delta;
  double horizon;  // T
  double s_bound;  // s used inside bound_at; s_min unless rebound
  bool verified;   // schedule meets eta_min and s_min

  double bound_at(double t) const;
  ConvergenceCertificate with_schedule(const StepSizeSchedule& schedule) const;
};

ConvergenceCertificate convergence_certificate(
    const ProbabilityWeighting& weighting, double T, double delta);

/// True iff q_i^T q_j >= 0 for all pairs in the subset and q_i^T v >= 0 for
/// every member, to a -1e-12 tolerance.
bool self_aligned_check(const ItemCatalog& catalog,
                        const std::vector<std::size_t>& indices,
                        const UnitVector& v);

/// Stationarity regret bound for a certified randomized run:
/// 4 e^2 (s+2)(1 + log((T+s)/s)) + T ||v_1 - p_0||.
double stationarity_regret_bound(const ConvergenceCertificate& certificate,
                                 const UnitVector& p0, double T);

}  // namespace prefdyn
