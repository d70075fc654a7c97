#include "prefdyn/objectives.hpp"

#include <cmath>
#include <numeric>

namespace prefdyn {

RegretReport regret(const TrajectoryRecord& trajectory, Objective objective) {
  if (trajectory.horizon() == 0) {
    throw DomainError("regret of an empty trajectory");
  }
  const std::vector<double>& rewards = objective == Objective::Affinity
                                           ? trajectory.rewards_affinity
                                           : trajectory.rewards_stationarity;
  RegretReport report{objective, {}, 0.0, std::nullopt};
  report.per_step_regret.reserve(rewards.size());
  for (const double r : rewards) {
    report.per_step_regret.push_back(1.0 - r);
    report.cumulative += 1.0 - r;
  }
  return report;
}

double fixed_regret_bound(double p0_dot_q, const StepSizeSchedule& schedule) {
  if (!(p0_dot_q > 0.0)) {
    throw DomainError("fixed_regret_bound requires p0.q > 0");
  }
  double c_gamma;
  if (schedule.kind() == StepSizeSchedule::Kind::Constant) {
    const double eta = schedule.eta();
    // Geometric sum of gamma_t^2: (eta+1)^2 / (eta^2 + 2 eta).
    c_gamma = (eta + 1.0) * (eta + 1.0) / (eta * eta + 2.0 * eta);
  } else {
    const double s = static_cast<double>(schedule.s());
    c_gamma = s * s * M_PI * M_PI / 6.0;
  }
  return c_gamma * (1.0 / (p0_dot_q * p0_dot_q) - 1.0);
}

double stationarity_linear_rate(double p0_dot_q,
                                const StepSizeSchedule& schedule) {
  if (!(p0_dot_q > 0.0) || !(p0_dot_q < 1.0)) {
    throw DomainError("stationarity_linear_rate requires p0.q in (0, 1)");
  }
  const double c = p0_dot_q;
  const double gamma1 = std::sqrt(gamma_sq(schedule, 1));
  const double denom =
      std::sqrt(c * c + gamma1 * gamma1 * (1.0 - c * c));
  const double c1 = (gamma1 + c * c * (1.0 - gamma1)) / denom;  // p_0^T p_1
  return (1.0 - c1) / 2.0;
}

double ellipse_constrained_min(double a, double b, double c,
                               std::size_t n_points) {
  if (!(a > 0.0) || a > 1.0 || !(b > 0.0) || b > 1.0 || !(c > 0.0) ||
      c > 1.0) {
    throw DomainError("ellipse_constrained_min requires a, b, c in (0, 1]");
  }
  if (n_points < 2) throw DomainError("need at least two sweep points");

  // Constraint arc in the positive quadrant: for x in [0, x_max],
  // y = c x + sqrt(1 - (1-c^2) x^2) is always admissible, and the lower
  // branch y = c x - sqrt(...) becomes admissible for x >= 1. The sweep
  // hits x = 0 (point (0,1)) and x = 1 (point (1,0)) exactly.
  const double one_minus_c2 = 1.0 - c * c;
  const double x_max =
      one_minus_c2 > 1e-15 ? 1.0 / std::sqrt(one_minus_c2) : 64.0;

  double best = std::numeric_limits<double>::infinity();
  const auto consider = [&](double x, double y) {
    if (y >= -1e-15) best = std::min(best, a * x + b * std::max(y, 0.0));
  };
  for (std::size_t i = 0; i < n_points; ++i) {
    const double x =
        x_max * static_cast<double>(i) / static_cast<double>(n_points - 1);
    const double disc = std::max(0.0, 1.0 - one_minus_c2 * x * x);
    const double root = std::sqrt(disc);
    consider(x, c * x + root);
    if (x >= 1.0) consider(x, c * x - root);
  }
  // Boundary points of the arc, exactly.
  consider(0.0, 1.0);
  consider(1.0, 0.0);
  return best;
}

}  // namespace prefdyn
