#pragma once

#include <optional>
#include <vector>

#include "prefdyn/dynamics.hpp"

namespace prefdyn {

enum class Objective { Affinity, Stationarity };

struct RegretReport {
  Objective objective;
  std::vector<double> per_step_regret;  // 1 - r_t, each in [0, 2]
  double cumulative;
  std::optional<double> bound;  // analytic bound, when the caller has one
};

/// Per-step regret 1 - r_t against the ideal reward 1, summed over
/// t in [0, T). Affinity uses r_t = p_t^T q_t, stationarity r_t = p_t^T p_0.
RegretReport regret(const TrajectoryRecord& trajectory, Objective objective);

/// Constant bound on cumulative affinity regret of a fixed recommendation
/// with c = p_0^T q > 0: C_gamma (c^{-2} - 1), where C_gamma is
/// (eta+1)^2 / (eta^2 + 2 eta) for constant steps and s^2 pi^2 / 6 for
/// decreasing steps.
double fixed_regret_bound(double p0_dot_q, const StepSizeSchedule& schedule);

/// Per-step floor on stationarity regret of a fixed recommendation
/// q != p_0: returns C = (1 - C_1)/2 > 0 where C_1 = p_0^T p_1 evaluated in
/// closed form at gamma_1. Cumulative stationarity regret grows at least
/// like C * T.
double stationarity_linear_rate(double p0_dot_q,
                                const StepSizeSchedule& schedule);

/// Test oracle: min of a x + b y over {x, y >= 0, x^2 + y^2 - 2 c x y = 1}
/// by parametric sweep of the constraint arc with n_points per branch.
/// The sweep includes the boundary points (1, 0) and (0, 1) exactly; the
/// analytic value is min{a, b}.
double ellipse_constrained_min(double a, double b, double c,
                               std::size_t n_points);

}  // namespace prefdyn
