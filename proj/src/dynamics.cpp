#include "prefdyn/dynamics.hpp"

#include <cmath>
#include <string>

namespace prefdyn {

UnitVector step(const UnitVector& p, const UnitVector& q, double eta) {
  if (p.dim() != q.dim()) {
    throw DimensionMismatchError("step: p and q dimensions differ");
  }
  if (!(eta > 0.0)) {
    throw DomainError("step: eta must be positive");
  }
  const double affinity = p.dot(q);
  if (affinity == 0.0) return p;
  return normalize(p.vec() + eta * affinity * q.vec());
}

TrajectoryRecord simulate(const UnitVector& p0, Policy& policy,
                          const ItemCatalog& catalog,
                          const StepSizeSchedule& schedule, std::size_t T,
                          double noise_sigma, CounterRng& noise_rng) {
  if (T < 1) throw DomainError("simulate: horizon must be at least 1");
  if (p0.dim() != catalog.dim()) {
    throw DimensionMismatchError("simulate: p0 and catalog dimensions differ");
  }
  TrajectoryRecord record{{}, {}, schedule, {}, {}, {}};
  record.preferences.reserve(T + 1);
  record.recommendations.reserve(T);
  record.rewards_affinity.reserve(T);
  record.rewards_stationarity.reserve(T);
  record.observations.reserve(T);

  UnitVector p = p0;
  record.preferences.push_back(p);
  for (std::size_t t = 0; t < T; ++t) {
    const std::size_t index = policy.recommend(t);
    const UnitVector& q = catalog.item(index);
    const double affinity = p.dot(q);
    const double observation =
        noise_sigma > 0.0 ? affinity + noise_sigma * noise_rng.normal()
                          : affinity;
    policy.observe(t, observation);

    record.recommendations.push_back(index);
    record.rewards_affinity.push_back(affinity);
    record.rewards_stationarity.push_back(p.dot(p0));
    record.observations.push_back(observation);

    p = step(p, q, schedule.eta_at(t));
    record.preferences.push_back(p);
  }
  return record;
}

double gamma_sq(const StepSizeSchedule& schedule, std::size_t t) {
  if (t == 0) return 1.0;
  if (schedule.kind() == StepSizeSchedule::Kind::Constant) {
    return std::pow(schedule.eta() + 1.0, -2.0 * static_cast<double>(t));
  }
  const auto eta = static_cast<std::int64_t>(schedule.eta());
  const auto s = schedule.s();
  double product = 1.0;
  for (std::int64_t k = 0; k < eta; ++k) {
    const double factor = static_cast<double>(s + k) /
                          (static_cast<double>(t) + static_cast<double>(s + k));
    product *= factor * factor;
  }
  return product;
}

double closed_form_affinity(double p0_dot_q, const StepSizeSchedule& schedule,
                            std::size_t t) {
  if (!(p0_dot_q > 0.0) || p0_dot_q > 1.0) {
    throw DomainError("closed_form_affinity requires p0.q in (0, 1]; got " +
                      std::to_string(p0_dot_q));
  }
  const double gap = 1.0 / (p0_dot_q * p0_dot_q) - 1.0;
  return 1.0 / std::sqrt(1.0 + gamma_sq(schedule, t) * gap);
}

TrajectoryCoefficients closed_form_coefficients(
    const UnitVector& p0, const UnitVector& q,
    const StepSizeSchedule& schedule, std::size_t t) {
  const double c = p0.dot(q);
  if (std::abs(std::abs(c) - 1.0) <= 1e-12) {
    throw DegenerateSpanError(
        "closed_form_coefficients: p0 and q are collinear");
  }
  if (!(c > 0.0)) {
    throw DomainError(
        "closed_form_coefficients requires p0.q > 0 (flip q first)");
  }
  const double gamma = std::sqrt(gamma_sq(schedule, t));
  const double denom = std::sqrt(c * c + gamma * gamma * (1.0 - c * c));
  return {gamma / denom, c * (1.0 - gamma) / denom};
}

TransferMatrixSequence transfer_matrices(
    const std::vector<std::size_t>& recommendations, const ItemCatalog& catalog,
    const StepSizeSchedule& schedule) {
  const Eigen::Index d = catalog.dim();
  TransferMatrixSequence sequence;
  sequence.matrices.reserve(recommendations.size() + 1);
  sequence.matrices.push_back(Matrix::Identity(d, d));
  for (std::size_t t = 0; t < recommendations.size(); ++t) {
    const Vector& q = catalog.item(recommendations[t]).vec();
    const Matrix update =
        Matrix::Identity(d, d) + schedule.eta_at(t) * (q * q.transpose());
    sequence.matrices.push_back(update * sequence.matrices.back());
  }
  return sequence;
}

double coeff_f1(double x, double a) {
  return x / std::sqrt(a + x * x * (1.0 - a));
}

double coeff_f2(double x, double a) {
  return (1.0 - x) / std::sqrt(a + x * x * (1.0 - a));
}

double coeff_f3(double x, double a) {
  return (x + a * a * (1.0 - x)) / std::sqrt(a + x * x * (1.0 - a));
}

}  // namespace prefdyn
