#include "prefdyn/identification.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <utility>

#include "prefdyn/rng.hpp"

namespace prefdyn {

ObservationPlan::ObservationPlan(std::vector<std::size_t> recommendations,
                                 ItemCatalog catalog, StepSizeSchedule schedule)
    : recommendations_(std::move(recommendations)),
      catalog_(std::move(catalog)),
      schedule_(schedule),
      transfer_(transfer_matrices(recommendations_, catalog_, schedule_)) {
  if (recommendations_.empty()) {
    throw DomainError("observation plan needs at least one recommendation");
  }
}

Vector observation_map_raw(const ObservationPlan& plan, const Vector& p) {
  if (p.size() != plan.catalog().dim()) {
    throw DimensionMismatchError("observation_map: dimension mismatch");
  }
  const std::size_t T = plan.horizon();
  Vector y(static_cast<Eigen::Index>(T));
  for (std::size_t t = 0; t < T; ++t) {
    const Matrix& phi = plan.transfer().matrices[t];
    const Vector u = phi * p;
    y[static_cast<Eigen::Index>(t)] =
        plan.catalog().item(plan.recommendations()[t]).dot(u) / u.norm();
  }
  return y;
}

Vector observation_map(const ObservationPlan& plan, const UnitVector& p0) {
  return observation_map_raw(plan, p0.vec());
}

Matrix observation_jacobian(const ObservationPlan& plan,
                            const UnitVector& p0) {
  const std::size_t T = plan.horizon();
  const Eigen::Index d = plan.catalog().dim();
  Matrix jacobian(static_cast<Eigen::Index>(T), d);
  for (std::size_t t = 0; t < T; ++t) {
    const Matrix& phi = plan.transfer().matrices[t];
    const Vector& q = plan.catalog().item(plan.recommendations()[t]).vec();
    const Vector u = phi * p0.vec();  // Phi_t p_0
    const double n = u.norm();
    const Vector w = phi.transpose() * q;
    const double affinity = p0.vec().dot(w);  // q^T Phi_t p_0
    // (1/n) (I - Phi^T Phi p p^T / n^2) Phi^T q
    jacobian.row(static_cast<Eigen::Index>(t)) =
        (w / n - (phi.transpose() * u) * (affinity / (n * n * n))).transpose();
  }
  return jacobian;
}

Matrix tangent_basis(const UnitVector& p) {
  const Eigen::Index d = p.dim();
  const double sign = p[0] >= 0.0 ? 1.0 : -1.0;
  Vector u = p.vec();
  u[0] += sign;
  const Matrix house =
      Matrix::Identity(d, d) - (2.0 / u.squaredNorm()) * (u * u.transpose());
  return house.rightCols(d - 1);
}

InvertibilityReport local_invertibility_check(const ObservationPlan& plan,
                                              const UnitVector& p0) {
  InvertibilityReport report;
  report.jacobian = observation_jacobian(plan, p0);
  report.radial_residual = (report.jacobian * p0.vec()).norm();
  const Matrix basis = tangent_basis(p0);
  const Matrix restricted = report.jacobian * basis;
  Eigen::JacobiSVD<Matrix> svd(restricted);
  report.tangent_min_singular =
      svd.singularValues()[svd.singularValues().size() - 1];
  report.locally_invertible = report.tangent_min_singular > 1e-8;
  return report;
}

namespace {

struct GaussNewtonOutcome {
  UnitVector estimate;
  double objective;  // (1/2)||F(p) - y||^2
  double grad_norm;
  int iterations;
  bool converged;
};

GaussNewtonOutcome gauss_newton(const ObservationPlan& plan, const Vector& y,
                                const UnitVector& init,
                                const EstimateOptions& options) {
  UnitVector p = init;
  Vector residual = observation_map(plan, p) - y;
  double objective = 0.5 * residual.squaredNorm();
  double grad_norm = std::numeric_limits<double>::infinity();
  int iter = 0;
  bool converged = false;

  for (; iter < options.max_iterations; ++iter) {
    const Matrix jacobian = observation_jacobian(plan, p);
    const Vector gradient = jacobian.transpose() * residual;
    grad_norm = gradient.norm();  // already tangent: J p = 0
    if (grad_norm <= options.gradient_tol) {
      converged = true;
      break;
    }

    const Matrix basis = tangent_basis(p);
    const Matrix jb = jacobian * basis;
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(jb);
    Vector z = cod.solve(-residual);
    Vector direction = basis * z;
    double descent = gradient.dot(direction);
    if (!(descent < 0.0)) {
      // Rank-deficient corner: fall back to steepest descent.
      direction = -gradient;
      descent = -grad_norm * grad_norm;
    }

    bool accepted = false;
    double tau = 1.0;
    for (int backtrack = 0; backtrack < 40; ++backtrack) {
      const UnitVector candidate = normalize(p.vec() + tau * direction);
      const Vector candidate_residual = observation_map(plan, candidate) - y;
      const double candidate_objective = 0.5 * candidate_residual.squaredNorm();
      if (candidate_objective <= objective + 1e-4 * tau * descent) {
        p = candidate;
        residual = candidate_residual;
        objective = candidate_objective;
        accepted = true;
        break;
      }
      tau *= 0.5;
    }
    if (!accepted) break;  // line search stalled
  }

  if (!converged) {
    const Matrix jacobian = observation_jacobian(plan, p);
    grad_norm = (jacobian.transpose() * residual).norm();
    converged = grad_norm <= options.gradient_tol;
  }
  return {p, objective, grad_norm, iter, converged};
}

}  // namespace

EstimateResult estimate_initial_preference(const ObservationPlan& plan,
                                           const Vector& observations,
                                           const UnitVector& init,
                                           const EstimateOptions& options) {
  if (observations.size() != static_cast<Eigen::Index>(plan.horizon())) {
    throw DimensionMismatchError(
        "estimate_initial_preference: observation length mismatch");
  }

  GaussNewtonOutcome best = gauss_newton(plan, observations, init, options);
  if (options.extra_start_pairs > 0) {
    CounterRng rng(options.seed, 0, /*tag=*/0xE571u);
    for (int pair = 0; pair < options.extra_start_pairs; ++pair) {
      const UnitVector u = sample_unit_sphere(plan.catalog().dim(), rng);
      for (const double sign : {1.0, -1.0}) {
        const GaussNewtonOutcome candidate = gauss_newton(
            plan, observations, normalize(sign * u.vec()), options);
        if (candidate.objective < best.objective) best = candidate;
      }
    }
  }

  return EstimateResult{best.estimate, std::sqrt(2.0 * best.objective),
                        best.grad_norm, best.iterations, best.converged};
}

}  // namespace prefdyn
