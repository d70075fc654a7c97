#include "prefdyn/policies.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace prefdyn {

ProbabilityWeighting::ProbabilityWeighting(Vector alpha, ItemCatalog catalog)
    : alpha_(std::move(alpha)), catalog_(std::move(catalog)) {
  if (static_cast<std::size_t>(alpha_.size()) != catalog_.size()) {
    throw DimensionMismatchError(
        "weighting has " + std::to_string(alpha_.size()) + " entries for " +
        std::to_string(catalog_.size()) + " items");
  }
  if (alpha_.minCoeff() < 0.0) {
    throw DomainError("probability weights must be nonnegative");
  }
  if (std::abs(alpha_.sum() - 1.0) > 1e-12) {
    throw DomainError("probability weights must sum to 1 within 1e-12");
  }
}

Matrix ProbabilityWeighting::covariance() const {
  const Matrix& q = catalog_.matrix();
  return q * alpha_.asDiagonal() * q.transpose();
}

FixedPolicy::FixedPolicy(std::size_t index, const ItemCatalog& catalog)
    : index_(index) {
  if (index >= catalog.size()) {
    throw IndexOutOfRangeError("fixed policy index " + std::to_string(index) +
                               " out of range");
  }
}

RandomizedPolicy::RandomizedPolicy(ProbabilityWeighting weighting,
                                   CounterRng rng)
    : weighting_(std::move(weighting)), rng_(rng) {}

std::size_t RandomizedPolicy::recommend(std::size_t) {
  return rng_.categorical(weighting_.alpha());
}

EtcPolicy::EtcPolicy(const EtcConfig& config, const ItemCatalog& catalog,
                     CounterRng rng)
    : config_(config) {
  const UnitVector& q1 = catalog.item(config.i1);
  const UnitVector& q2 = catalog.item(config.i2);
  if (q1.dot(q2) >= 0.0) {
    throw PreconditionError(
        "explore-then-commit requires q_1^T q_2 < 0; got " +
        std::to_string(q1.dot(q2)));
  }
  if (config.exploration_steps < 1 ||
      config.exploration_steps >= config.horizon) {
    throw PreconditionError("requires 1 <= T_e < T");
  }
  if (config.sigma < 0.0 || !(config.gap > 0.0) || config.gap > 1.0) {
    throw PreconditionError("requires sigma >= 0 and gap a in (0, 1]");
  }
  const bool pick_first = (rng.next_u64() & 1ull) == 0ull;
  explored_ = pick_first ? config.i1 : config.i2;
  other_ = pick_first ? config.i2 : config.i1;
}

std::size_t EtcPolicy::recommend(std::size_t t) {
  if (t < config_.exploration_steps) return explored_;
  if (!committed_) {
    committed_ = running_sum_ >= 0.0 ? explored_ : other_;
  }
  return *committed_;
}

void EtcPolicy::observe(std::size_t t, double y) {
  if (t < config_.exploration_steps) running_sum_ += y;
}

std::size_t etc_exploration_length(double sigma, double gap, std::size_t T) {
  if (sigma < 0.0 || !(gap > 0.0) || gap > 1.0 || T < 2) {
    throw DomainError(
        "etc_exploration_length requires sigma >= 0, a in (0, 1], T >= 2");
  }
  const double raw = sigma * sigma * std::log(static_cast<double>(T)) /
                     (gap * gap);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(raw)));
}

double ConvergenceCertificate::bound_at(double t) const {
  return 4.0 * M_E * M_E * (s_bound + 2.0) / (s_bound + 1.0 + t);
}

ConvergenceCertificate ConvergenceCertificate::with_schedule(
    const StepSizeSchedule& schedule) const {
  ConvergenceCertificate out = *this;
  if (schedule.kind() != StepSizeSchedule::Kind::Decreasing) {
    out.verified = false;
    return out;
  }
  out.s_bound = static_cast<double>(schedule.s());
  out.verified =
      schedule.eta() >= eta_min && static_cast<double>(schedule.s()) >= s_min;
  return out;
}

ConvergenceCertificate convergence_certificate(
    const ProbabilityWeighting& weighting, double T, double delta) {
  if (!(delta > 0.0) || delta >= 1.0) {
    throw DomainError("delta must lie in (0, 1)");
  }
  const Matrix sigma = weighting.covariance();
  const SymmetricEigResult eig = symmetric_eig(sigma);
  const double lambda1 = eig.eigenvalues[0];
  const double lambda2 = eig.eigenvalues[1];
  if (lambda1 - lambda2 <= 1e-10) {
    throw NoEigengapError("covariance eigengap " +
                          std::to_string(lambda1 - lambda2) +
                          " is not positive");
  }

  double spread = lambda1;
  const ItemCatalog& catalog = weighting.catalog();
  for (std::size_t j = 0; j < catalog.size(); ++j) {
    const Vector& q = catalog.item(j).vec();
    const Matrix deviation = q * q.transpose() - sigma;
    const SymmetricEigResult dev_eig = symmetric_eig(deviation);
    const double norm2 = std::max(std::abs(dev_eig.eigenvalues[0]),
                                  std::abs(dev_eig.eigenvalues[dev_eig.eigenvalues.size() - 1]));
    spread = std::max(spread, norm2);
  }

  constexpr double kConcentration = 175.0;
  const double eta_min = 8.0 / (lambda1 - lambda2);
  const double s_min =
      1.0 + 2.0 * kConcentration * kConcentration * eta_min * eta_min *
                spread * spread *
                std::log(2.0 * kConcentration * spread * T * eta_min / delta);

  ConvergenceCertificate cert{
      UnitVector(eig.eigenvectors.col(0)),
      lambda1,
      lambda2,
      spread,
      eta_min,
      s_min,
      delta,
      T,
      s_min,
      true,
  };
  return cert;
}

bool self_aligned_check(const ItemCatalog& catalog,
                        const std::vector<std::size_t>& indices,
                        const UnitVector& v) {
  if (indices.empty()) {
    throw PreconditionError("self_aligned_check requires a nonempty subset");
  }
  constexpr double tol = -1e-12;
  for (std::size_t a = 0; a < indices.size(); ++a) {
    const UnitVector& qa = catalog.item(indices[a]);
    if (qa.dot(v) < tol) return false;
    for (std::size_t b = a + 1; b < indices.size(); ++b) {
      if (qa.dot(catalog.item(indices[b])) < tol) return false;
    }
  }
  return true;
}

double stationarity_regret_bound(const ConvergenceCertificate& certificate,
                                 const UnitVector& p0, double T) {
  const double s = certificate.s_bound;
  const double log_term = std::log((T + s) / s);
  const double drift = (certificate.v1.vec() - p0.vec()).norm();
  return 4.0 * M_E * M_E * (s + 2.0) * (1.0 + log_term) + T * drift;
}

}  // namespace prefdyn
