#include <cmath>
#include <functional>
#include <ostream>

#include "prefdyn/harness.hpp"
#include "prefdyn/objectives.hpp"

namespace prefdyn {

namespace {

StepSizeSchedule random_schedule(CounterRng& rng) {
  if (rng.uniform01() < 0.5) {
    return StepSizeSchedule::constant(0.2 + 2.0 * rng.uniform01());
  }
  const auto eta = static_cast<std::int64_t>(1 + rng.next_u64() % 3);
  const auto s = static_cast<std::int64_t>(1 + rng.next_u64() % 4);
  return StepSizeSchedule::decreasing(eta, s);
}

// p0 and q with the requested affinity range, in dimension d.
std::pair<UnitVector, UnitVector> random_pair(CounterRng& rng, Eigen::Index d,
                                              double lo, double hi) {
  const UnitVector q = sample_unit_sphere(d, rng);
  while (true) {
    const UnitVector p = sample_unit_sphere(d, rng);
    const double c = p.dot(q);
    if (c > lo && c < hi) return {p, q};
  }
}

bool check_eig_reconstruction() {
  CounterRng rng(11, 0, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(rng.next_u64() % 19);
    Matrix a(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j <= i; ++j) {
        a(i, j) = a(j, i) = rng.normal();
      }
    }
    const SymmetricEigResult eig = symmetric_eig(a);
    const Matrix recon = eig.eigenvectors *
                         eig.eigenvalues.asDiagonal() *
                         eig.eigenvectors.transpose();
    if ((recon - a).norm() > 1e-8) return false;
    const SymmetricEigResult again = symmetric_eig(a);
    if (again.eigenvalues != eig.eigenvalues ||
        again.eigenvectors != eig.eigenvectors) {
      return false;
    }
  }
  return true;
}

bool check_closed_form_equivalence() {
  CounterRng rng(12, 0, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(rng.next_u64() % 5);
    const auto [p0, q] = random_pair(rng, d, 0.05, 0.95);
    const StepSizeSchedule schedule = random_schedule(rng);
    std::vector<UnitVector> items{q};
    const ItemCatalog catalog(items);
    FixedPolicy policy(0, catalog);
    CounterRng noise(12, static_cast<std::uint64_t>(trial), 1);
    const TrajectoryRecord record =
        simulate(p0, policy, catalog, schedule, 200, 0.0, noise);
    const double c = p0.dot(q);
    double previous_sq = c * c;
    for (std::size_t t = 0; t < record.horizon(); ++t) {
      const double simulated = record.rewards_affinity[t];
      const double closed = closed_form_affinity(c, schedule, t);
      if (std::abs(simulated - closed) > 1e-9) return false;
      if (simulated <= 0.0) return false;  // sign invariance
      const double sq = simulated * simulated;
      if (sq < previous_sq - 1e-12) return false;  // monotone (p_t^T q)^2
      previous_sq = sq;
    }
  }
  return true;
}

bool check_design_equivalences() {
  CounterRng rng(13, 0, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(rng.next_u64() % 4);
    const std::size_t n = 2 + rng.next_u64() % 11;
    std::vector<UnitVector> items;
    for (std::size_t i = 0; i < n; ++i) {
      items.push_back(sample_unit_sphere(d, rng));
    }
    const ItemCatalog catalog(items);
    const UnitVector v = sample_unit_sphere(d, rng);
    const SignedCatalog signed_catalog = build_signed_catalog(catalog, v);

    bool nnls_feasible = true;
    Vector x;
    try {
      x = solve_eig_feasibility(catalog, v).x;
    } catch (const InfeasibleError&) {
      nnls_feasible = false;
    }
    bool conic_feasible = true;
    try {
      conical_hull_weights(signed_catalog, v);
    } catch (const InfeasibleError&) {
      conic_feasible = false;
    }
    if (nnls_feasible != conic_feasible) return false;
    if (!nnls_feasible) continue;

    Vector w(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      w[i] = x[i] * std::abs(catalog.item(static_cast<std::size_t>(i)).dot(v));
    }
    if (check_dominance(catalog, x) !=
        weighted_covariance_condition(signed_catalog, v, w)) {
      return false;
    }
    if (gershgorin_sufficient(signed_catalog, v, w) &&
        !weighted_covariance_condition(signed_catalog, v, w)) {
      return false;
    }
  }
  return true;
}

bool check_jacobian() {
  CounterRng rng(14, 0, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(rng.next_u64() % 5);
    const std::size_t n = 2 + rng.next_u64() % 4;
    std::vector<UnitVector> items;
    for (std::size_t i = 0; i < n; ++i) {
      items.push_back(sample_unit_sphere(d, rng));
    }
    const ItemCatalog catalog(items);
    const std::size_t T = 4 + rng.next_u64() % 12;
    std::vector<std::size_t> recs;
    for (std::size_t t = 0; t < T; ++t) recs.push_back(rng.next_u64() % n);
    const ObservationPlan plan(recs, catalog,
                               StepSizeSchedule::decreasing(1, 2));
    const UnitVector p0 = sample_unit_sphere(d, rng);
    const Matrix jacobian = observation_jacobian(plan, p0);
    if ((jacobian * p0.vec()).norm() > 1e-8) return false;

    const double h = 1e-6;
    for (Eigen::Index col = 0; col < d; ++col) {
      Vector lo = p0.vec(), hi = p0.vec();
      lo[col] -= h;
      hi[col] += h;
      const Vector fd =
          (observation_map_raw(plan, hi) - observation_map_raw(plan, lo)) /
          (2.0 * h);
      if ((fd - jacobian.col(col)).cwiseAbs().maxCoeff() > 1e-5) return false;
    }
  }
  return true;
}

bool check_etc_noiseless() {
  const Matrix columns = (Matrix(2, 2) << 1.0, -std::sqrt(0.5),  //
                          0.0, -std::sqrt(0.5))
                             .finished();
  const ItemCatalog catalog(columns);
  const UnitVector p0 = normalize((Vector(2) << 0.5, std::sqrt(3) / 2).finished());
  for (std::uint64_t trial = 0; trial < 8; ++trial) {
    EtcConfig config{0, 1, 5, 50, 0.0, 0.5};
    EtcPolicy policy(config, catalog, CounterRng(99, trial, 0));
    CounterRng noise(99, trial, 1);
    simulate(p0, policy, catalog, StepSizeSchedule::decreasing(1, 1), 50, 0.0,
             noise);
    if (!policy.committed_index() || *policy.committed_index() != 0) {
      return false;
    }
  }
  return true;
}

bool check_determinism() {
  ExperimentConfig config{Scenario::FixedRec, 2,
                          (Matrix(2, 1) << std::sqrt(0.5), std::sqrt(0.5))
                              .finished(),
                          std::nullopt, StepSizeSchedule::constant(1.0)};
  config.horizon = 32;
  config.trials = 3;
  config.seed = 2024;
  config.item = 0;
  const RunResult first = run_experiment(config);
  const RunResult second = run_experiment(config);
  return to_csv(first.table, first.config_hash, config.seed) ==
             to_csv(second.table, second.config_hash, config.seed) &&
         first.summary_json == second.summary_json;
}

}  // namespace

bool run_invariant_checks(std::ostream& out) {
  const std::pair<const char*, std::function<bool()>> checks[] = {
      {"eigendecomposition reconstruction and determinism",
       check_eig_reconstruction},
      {"closed-form trajectory matches simulation", check_closed_form_equivalence},
      {"design feasibility and dominance equivalences", check_design_equivalences},
      {"observation Jacobian vs finite differences", check_jacobian},
      {"noiseless explore-then-commit picks the aligned item",
       check_etc_noiseless},
      {"identical config and seed reproduce identical output",
       check_determinism},
  };
  bool all_ok = true;
  for (const auto& [name, check] : checks) {
    bool ok = false;
    try {
      ok = check();
    } catch (const std::exception& e) {
      out << "FAIL — " << name << " (" << e.what() << ")\n";
      all_ok = false;
      continue;
    }
    out << (ok ? "ok — " : "FAIL — ") << name << "\n";
    all_ok = all_ok && ok;
  }
  return all_ok;
}

}  // namespace prefdyn
