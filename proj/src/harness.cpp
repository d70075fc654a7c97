#include "prefdyn/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "prefdyn/objectives.hpp"

namespace prefdyn {

namespace {

using json = nlohmann::ordered_json;

// Stream tags for (seed, trial, tag) counter streams.
constexpr std::uint64_t kTagP0 = 1;
constexpr std::uint64_t kTagPolicy = 2;
constexpr std::uint64_t kTagNoise = 3;
constexpr std::uint64_t kTagCatalog = 4;
constexpr std::uint64_t kTagInit = 5;
constexpr std::uint64_t kTagPlan = 6;

std::string scenario_name(Scenario scenario) {
  switch (scenario) {
    case Scenario::FixedRec: return "fixed_rec";
    case Scenario::RandomizedRec: return "randomized_rec";
    case Scenario::EtcRegret: return "etc_regret";
    case Scenario::DesignAndConverge: return "design_and_converge";
    case Scenario::Identify: return "identify";
    case Scenario::ModeCollapse: return "mode_collapse";
  }
  throw ConfigError("unknown scenario");
}

Scenario scenario_from_name(const std::string& name) {
  if (name == "fixed_rec") return Scenario::FixedRec;
  if (name == "randomized_rec") return Scenario::RandomizedRec;
  if (name == "etc_regret") return Scenario::EtcRegret;
  if (name == "design_and_converge") return Scenario::DesignAndConverge;
  if (name == "identify") return Scenario::Identify;
  if (name == "mode_collapse") return Scenario::ModeCollapse;
  throw ConfigError("unknown scenario \"" + name + "\"");
}

Vector vector_from_json(const json& j, Eigen::Index expected_dim) {
  if (!j.is_array() || j.empty()) {
    throw ConfigError("expected a numeric array");
  }
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError("vector entries must be numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  if (expected_dim >= 0 && v.size() != expected_dim) {
    throw ConfigError("vector has dimension " + std::to_string(v.size()) +
                      ", expected " + std::to_string(expected_dim));
  }
  return v;
}

// Every vector referenced by a config must already be unit norm to 1e-9;
// it is then renormalized exactly.
Vector load_unit_vector(const json& j, Eigen::Index expected_dim) {
  Vector v = vector_from_json(j, expected_dim);
  const double norm = v.norm();
  if (std::abs(norm - 1.0) > 1e-9) {
    throw ConfigError("referenced vector has norm " + std::to_string(norm) +
                      "; unit vectors are required (tolerance 1e-9)");
  }
  return v / norm;
}

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

ItemCatalog materialize_catalog(const ExperimentConfig& config) {
  if (config.catalog_vectors) {
    return ItemCatalog(*config.catalog_vectors);
  }
  if (!config.catalog_random) {
    throw ConfigError("config needs a catalog");
  }
  const auto [count, catalog_seed] = *config.catalog_random;
  CounterRng rng(catalog_seed, 0, kTagCatalog);
  std::vector<UnitVector> items;
  items.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    items.push_back(sample_unit_sphere(config.dimension, rng));
  }
  return ItemCatalog(std::move(items));
}

UnitVector trial_p0(const ExperimentConfig& config, std::size_t trial,
                    Eigen::Index d) {
  if (config.p0) return UnitVector(*config.p0);
  CounterRng rng(config.seed, trial, kTagP0);
  return sample_unit_sphere(d, rng);
}

double angle_between(const Vector& a, const Vector& b) {
  return std::acos(std::clamp(a.dot(b) / (a.norm() * b.norm()), -1.0, 1.0));
}

void append_row(ResultTable& table, std::initializer_list<double> values) {
  table.rows.emplace_back(values);
}

json base_summary(const ExperimentConfig& config, std::uint64_t hash) {
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(hash));
  json j;
  j["scenario"] = scenario_name(config.scenario);
  j["config_hash"] = std::string(hex);
  j["seed"] = config.seed;
  j["trials"] = config.trials;
  j["horizon"] = config.horizon;
  return j;
}

double c_gamma_of(const StepSizeSchedule& schedule) {
  if (schedule.kind() == StepSizeSchedule::Kind::Constant) {
    const double eta = schedule.eta();
    return (eta + 1.0) * (eta + 1.0) / (eta * eta + 2.0 * eta);
  }
  const double s = static_cast<double>(schedule.s());
  return s * s * M_PI * M_PI / 6.0;
}

json certificate_to_json(const ConvergenceCertificate& cert) {
  json j;
  j["v1"] = vector_to_json(cert.v1.vec());
  j["lambda1"] = cert.lambda1;
  j["lambda2"] = cert.lambda2;
  j["eigengap"] = cert.lambda1 - cert.lambda2;
  j["spread_bound"] = cert.spread_bound;
  j["eta_min"] = cert.eta_min;
  j["s_min"] = cert.s_min;
  j["s_used"] = cert.s_bound;
  j["delta"] = cert.delta;
  j["verified"] = cert.verified;
  return j;
}

// ---------------------------------------------------------------------------
// scenario: fixed_rec

RunResult run_fixed_rec(const ExperimentConfig& config, std::uint64_t hash) {
  if (!config.item) throw ConfigError("fixed_rec needs \"item\"");
  const ItemCatalog catalog = materialize_catalog(config);
  if (*config.item >= catalog.size()) {
    throw ConfigError("item index out of range");
  }

  RunResult result;
  result.config_hash = hash;
  result.table.columns = {{"trial", true},
                          {"t", true},
                          {"affinity", false},
                          {"stationarity", false},
                          {"affinity_closed_form", false}};

  json summary = base_summary(config, hash);
  json affinity_regrets = json::array();
  json stationarity_regrets = json::array();
  json bounds = json::array();
  json final_affinity = json::array();
  bool bounds_ok = true;
  double max_deviation = 0.0;

  for (std::size_t trial = 0; trial < config.trials; ++trial) {
    const UnitVector p0 = trial_p0(config, trial, catalog.dim());
    FixedPolicy policy(*config.item, catalog);
    CounterRng noise_rng(config.seed, trial, kTagNoise);
    const TrajectoryRecord record =
        simulate(p0, policy, catalog, config.schedule, config.horizon,
                 config.noise_sigma, noise_rng);

    const double c = p0.dot(catalog.item(*config.item));
    for (std::size_t t = 0; t < record.horizon(); ++t) {
      double closed = 0.0;
      if (c != 0.0) {
        const double magnitude =
            closed_form_affinity(std::abs(c), config.schedule, t);
        closed = c > 0.0 ? magnitude : -magnitude;
      }
      max_deviation =
          std::max(max_deviation, std::abs(closed - record.rewards_affinity[t]));
      append_row(result.table,
                 {static_cast<double>(trial), static_cast<double>(t),
                  record.rewards_affinity[t], record.rewards_stationarity[t],
                  closed});
    }

    const RegretReport affinity = regret(record, Objective::Affinity);
    const RegretReport stationarity = regret(record, Objective::Stationarity);
    affinity_regrets.push_back(affinity.cumulative);
    stationarity_regrets.push_back(stationarity.cumulative);
    final_affinity.push_back(record.rewards_affinity.back());
    if (c > 0.0) {
      const double bound = fixed_regret_bound(c, config.schedule);
      bounds.push_back(bound);
      bounds_ok = bounds_ok && affinity.cumulative <= bound;
    } else {
      bounds.push_back(nullptr);
    }
  }

  summary["affinity_regret"] = affinity_regrets;
  summary["stationarity_regret"] = stationarity_regrets;
  summary["fixed_regret_bound"] = bounds;
  summary["bound_satisfied"] = bounds_ok;
  summary["max_closed_form_deviation"] = max_deviation;
  summary["final_affinity"] = final_affinity;
  result.summary_json = summary.dump(2);
  return result;
}

// ---------------------------------------------------------------------------
// scenario: randomized_rec / design_and_converge

struct RandomizedSetup {
  ItemCatalog catalog;
  Vector alpha;
  json design_block;  // null unless design ran
};

RandomizedSetup randomized_setup(const ExperimentConfig& config) {
  ItemCatalog catalog = materialize_catalog(config);
  if (config.scenario == Scenario::RandomizedRec) {
    if (!config.alpha) throw ConfigError("randomized_rec needs \"alpha\"");
    if (static_cast<std::size_t>(config.alpha->size()) != catalog.size()) {
      throw ConfigError("alpha length must match the catalog");
    }
    return {std::move(catalog), *config.alpha, json()};
  }

  // design_and_converge: pick weights for the requested target.
  UnitVector v = [&]() {
    if (config.target_v) return UnitVector(*config.target_v);
    if (config.target_item) {
      if (*config.target_item >= catalog.size()) {
        throw ConfigError("target index out of range");
      }
      return catalog.item(*config.target_item);
    }
    throw ConfigError("design_and_converge needs \"target\"");
  }();

  std::vector<std::size_t> indices(catalog.size());
  std::iota(indices.begin(), indices.end(), 0);
  if (config.subset_threshold) {
    indices = select_self_aligned_subset(catalog, v, *config.subset_threshold);
  }
  std::vector<UnitVector> selected;
  selected.reserve(indices.size());
  for (const std::size_t i : indices) selected.push_back(catalog.item(i));
  const ItemCatalog restricted(std::move(selected));

  EigengapOptions options;
  options.seed = config.seed;
  const DesignSolution design = maximize_eigengap(restricted, v, options);

  Vector alpha = Vector::Zero(static_cast<Eigen::Index>(catalog.size()));
  for (std::size_t j = 0; j < indices.size(); ++j) {
    alpha[static_cast<Eigen::Index>(indices[j])] =
        design.alpha[static_cast<Eigen::Index>(j)];
  }

  json block;
  block["x"] = vector_to_json(design.x);
  block["alpha"] = vector_to_json(alpha);
  block["lambda1"] = design.lambda1;
  block["residual"] = design.residual;
  block["dominant"] = design.dominant;
  block["eigengap"] = design.eigengap;
  block["self_aligned_support"] = design.self_aligned_support;
  json idx = json::array();
  for (const std::size_t i : indices) idx.push_back(i);
  block["subset_indices"] = idx;
  return {std::move(catalog), std::move(alpha), std::move(block)};
}

RunResult run_randomized(const ExperimentConfig& config, std::uint64_t hash) {
  RandomizedSetup setup = randomized_setup(config);
  const ProbabilityWeighting weighting(setup.alpha, setup.catalog);
  const ConvergenceCertificate certificate =
      convergence_certificate(weighting,
                              static_cast<double>(config.horizon),
                              config.delta)
          .with_schedule(config.schedule);
  const UnitVector& v1 = certificate.v1;

  RunResult result;
  result.config_hash = hash;
  result.table.columns = {{"trial", true},
                          {"t", true},
                          {"p_dot_v1", false},
                          {"bound_value", false}};

  std::size_t covered = 0;
  std::vector<double> final_alignment;
  std::vector<double> stationarity_regrets;
  std::size_t regret_within = 0;
  std::optional<double> regret_bound;

  for (std::size_t trial = 0; trial < config.trials; ++trial) {
    UnitVector p = trial_p0(config, trial, setup.catalog.dim());
    if (config.warm_start_steps && *config.warm_start_steps > 0) {
      // Fixed recommendations toward the item best aligned with v1, then
      // time restarts at 0 for the randomized phase.
      std::size_t best_item = 0;
      for (std::size_t i = 1; i < setup.catalog.size(); ++i) {
        if (v1.dot(setup.catalog.item(i)) >
            v1.dot(setup.catalog.item(best_item))) {
          best_item = i;
        }
      }
      for (std::size_t k = 0; k < *config.warm_start_steps; ++k) {
        p = step(p, setup.catalog.item(best_item),
                 config.schedule.eta_at(k));
      }
    }
    const UnitVector start = p;

    RandomizedPolicy policy(weighting,
                            CounterRng(config.seed, trial, kTagPolicy));
    CounterRng noise_rng(config.seed, trial, kTagNoise);
    const TrajectoryRecord record =
        simulate(start, policy, setup.catalog, config.schedule, config.horizon,
                 config.noise_sigma, noise_rng);

    bool in_bound = true;
    for (std::size_t t = 0; t <= record.horizon(); ++t) {
      const double alignment = record.preferences[t].dot(v1);
      const double bound = certificate.bound_at(static_cast<double>(t));
      in_bound = in_bound && (1.0 - alignment * alignment) <= bound;
      append_row(result.table,
                 {static_cast<double>(trial), static_cast<double>(t), alignment,
                  bound});
    }
    covered += in_bound ? 1 : 0;
    final_alignment.push_back(record.preferences.back().dot(v1));

    const RegretReport stationarity = regret(record, Objective::Stationarity);
    stationarity_regrets.push_back(stationarity.cumulative);
    const double bound = stationarity_regret_bound(
        certificate, start, static_cast<double>(config.horizon));
    if (trial == 0) regret_bound = bound;
    if (stationarity.cumulative <= bound) ++regret_within;
  }

  std::vector<double> sorted = final_alignment;
  std::sort(sorted.begin(), sorted.end());
  const double median =
      sorted.size() % 2 == 1
          ? sorted[sorted.size() / 2]
          : 0.5 * (sorted[sorted.size() / 2 - 1] + sorted[sorted.size() / 2]);

  json summary = base_summary(config, hash);
  summary["certificate"] = certificate_to_json(certificate);
  if (!setup.design_block.is_null()) summary["design"] = setup.design_block;
  summary["coverage_fraction"] =
      static_cast<double>(covered) / static_cast<double>(config.trials);
  summary["median_final_alignment"] = median;
  summary["mean_stationarity_regret"] =
      std::accumulate(stationarity_regrets.begin(), stationarity_regrets.end(),
                      0.0) /
      static_cast<double>(config.trials);
  if (regret_bound) summary["stationarity_regret_bound"] = *regret_bound;
  summary["regret_within_bound_fraction"] =
      static_cast<double>(regret_within) / static_cast<double>(config.trials);
  result.summary_json = summary.dump(2);
  return result;
}

// ---------------------------------------------------------------------------
// scenario: etc_regret

RunResult run_etc(const ExperimentConfig& config, std::uint64_t hash) {
  if (!config.item || !config.item2) {
    throw ConfigError("etc_regret needs \"item\" and \"item2\"");
  }
  if (!config.p0) throw ConfigError("etc_regret needs an explicit \"p0\"");
  const ItemCatalog catalog = materialize_catalog(config);
  const UnitVector p0(*config.p0);
  const UnitVector& q1 = catalog.item(*config.item);
  const UnitVector& q2 = catalog.item(*config.item2);
  if (p0.dot(q1) * p0.dot(q2) >= 0.0) {
    throw ConfigError(
        "etc_regret requires the two items to straddle the hemisphere of p0");
  }
  const double sigma = config.noise_sigma;
  const double gap =
      config.gap.value_or(std::min({std::abs(p0.dot(q1)), std::abs(p0.dot(q2)),
                                    std::abs(q1.dot(q2))}));
  const std::size_t exploration =
      config.exploration_steps.value_or(
          etc_exploration_length(sigma, gap, config.horizon));
  const std::size_t correct = p0.dot(q1) > 0.0 ? *config.item : *config.item2;

  RunResult result;
  result.config_hash = hash;
  result.table.columns = {{"trial", true},
                          {"t", true},
                          {"affinity", false},
                          {"committed_index", true}};

  std::size_t misidentified = 0;
  std::vector<double> regrets;
  for (std::size_t trial = 0; trial < config.trials; ++trial) {
    EtcConfig etc{*config.item, *config.item2, exploration, config.horizon,
                  sigma, gap};
    EtcPolicy policy(etc, catalog, CounterRng(config.seed, trial, kTagPolicy));
    CounterRng noise_rng(config.seed, trial, kTagNoise);
    const TrajectoryRecord record = simulate(
        p0, policy, catalog, config.schedule, config.horizon, sigma, noise_rng);

    for (std::size_t t = 0; t < record.horizon(); ++t) {
      const double committed =
          t >= exploration && policy.committed_index()
              ? static_cast<double>(*policy.committed_index())
              : -1.0;
      append_row(result.table,
                 {static_cast<double>(trial), static_cast<double>(t),
                  record.rewards_affinity[t], committed});
    }
    if (policy.committed_index() != correct) ++misidentified;
    regrets.push_back(regret(record, Objective::Affinity).cumulative);
  }

  const double rate =
      static_cast<double>(misidentified) / static_cast<double>(config.trials);
  const double stderr_mc = std::sqrt(
      rate * (1.0 - rate) / static_cast<double>(config.trials));
  const double misid_bound =
      std::exp(-gap * gap * static_cast<double>(exploration) / (sigma * sigma));
  const double mean_regret =
      std::accumulate(regrets.begin(), regrets.end(), 0.0) /
      static_cast<double>(config.trials);
  const double regret_bound =
      2.0 + c_gamma_of(config.schedule) / (gap * gap * gap * gap) +
      sigma * sigma * std::log(static_cast<double>(config.horizon)) /
          (gap * gap);

  json summary = base_summary(config, hash);
  summary["exploration_steps"] = exploration;
  summary["gap"] = gap;
  summary["sigma"] = sigma;
  summary["misidentified"] = misidentified;
  summary["misidentification_rate"] = rate;
  summary["misidentification_bound"] = misid_bound;
  summary["mc_standard_error"] = stderr_mc;
  summary["rate_within_bound"] = rate <= misid_bound + 3.0 * stderr_mc;
  summary["mean_regret"] = mean_regret;
  summary["regret_bound"] = regret_bound;
  summary["regret_within_bound"] = mean_regret <= regret_bound;
  result.summary_json = summary.dump(2);
  return result;
}

// ---------------------------------------------------------------------------
// scenario: identify

RunResult run_identify(const ExperimentConfig& config, std::uint64_t hash) {
  const ItemCatalog catalog = materialize_catalog(config);
  std::vector<std::size_t> recommendations;
  if (config.plan) {
    recommendations = *config.plan;
  } else {
    CounterRng rng(config.seed, 0, kTagPlan);
    recommendations.reserve(config.horizon);
    for (std::size_t t = 0; t < config.horizon; ++t) {
      recommendations.push_back(static_cast<std::size_t>(
          rng.next_u64() % catalog.size()));
    }
  }
  const ObservationPlan plan(recommendations, catalog, config.schedule);

  RunResult result;
  result.config_hash = hash;
  result.table.columns = {{"trial", true}, {"t", true}, {"y", false}};

  json errors = json::array();
  std::size_t converged_count = 0;
  double total_iterations = 0.0;
  InvertibilityReport report;
  bool have_report = false;

  for (std::size_t trial = 0; trial < config.trials; ++trial) {
    const UnitVector p0 = trial_p0(config, trial, catalog.dim());
    if (!have_report) {
      report = local_invertibility_check(plan, p0);
      have_report = true;
    }
    Vector y = observation_map(plan, p0);
    if (config.noise_sigma > 0.0) {
      CounterRng noise_rng(config.seed, trial, kTagNoise);
      for (Eigen::Index i = 0; i < y.size(); ++i) {
        y[i] += config.noise_sigma * noise_rng.normal();
      }
    }

    // Initial guess at the configured alignment with the hidden p0, tilted
    // along a seeded tangent direction.
    CounterRng init_rng(config.seed, trial, kTagInit);
    UnitVector init = p0;
    if (config.init_alignment < 1.0) {
      Vector tangent;
      do {
        const UnitVector z = sample_unit_sphere(catalog.dim(), init_rng);
        tangent = z.vec() - z.dot(p0) * p0.vec();
      } while (tangent.norm() < 1e-9);
      tangent.normalize();
      const double c = config.init_alignment;
      init = normalize(c * p0.vec() + std::sqrt(1.0 - c * c) * tangent);
    }

    const EstimateResult estimate =
        estimate_initial_preference(plan, y, init);
    errors.push_back((estimate.estimate.vec() - p0.vec()).norm());
    converged_count += estimate.converged ? 1 : 0;
    total_iterations += estimate.iterations;

    for (Eigen::Index t = 0; t < y.size(); ++t) {
      append_row(result.table, {static_cast<double>(trial),
                                static_cast<double>(t), y[t]});
    }
  }

  json summary = base_summary(config, hash);
  summary["tangent_min_singular"] = report.tangent_min_singular;
  summary["locally_invertible"] = report.locally_invertible;
  summary["radial_residual"] = report.radial_residual;
  summary["estimate_errors"] = errors;
  double max_error = 0.0;
  for (const auto& e : errors) max_error = std::max(max_error, e.get<double>());
  summary["max_estimate_error"] = max_error;
  summary["converged_fraction"] =
      static_cast<double>(converged_count) / static_cast<double>(config.trials);
  summary["mean_iterations"] =
      total_iterations / static_cast<double>(config.trials);
  result.summary_json = summary.dump(2);
  return result;
}

}  // namespace

// ---------------------------------------------------------------------------
// scenario: mode_collapse

RunResult mode_collapse_population(const ExperimentConfig& config) {
  const std::uint64_t hash = config_hash(config);
  if (!config.population || *config.population < 2) {
    throw ConfigError("mode_collapse needs \"population\" >= 2");
  }
  const ItemCatalog catalog = materialize_catalog(config);
  const std::size_t users = *config.population;
  if (catalog.size() >= users) {
    throw ConfigError("mode_collapse expects fewer items than users");
  }

  RunResult result;
  result.config_hash = hash;
  result.table.columns = {{"user", true},
                          {"t", true},
                          {"item", true},
                          {"affinity", false}};

  std::vector<UnitVector> initial;
  std::vector<UnitVector> final_prefs;
  std::vector<std::size_t> final_item(users, 0);

  for (std::size_t user = 0; user < users; ++user) {
    UnitVector p = trial_p0(config, user, catalog.dim());
    initial.push_back(p);
    std::size_t last_item = 0;
    for (std::size_t t = 0; t < config.horizon; ++t) {
      // Per-step personalization: the highest-affinity item right now.
      std::size_t pick = 0;
      double best = p.dot(catalog.item(0));
      for (std::size_t i = 1; i < catalog.size(); ++i) {
        const double value = p.dot(catalog.item(i));
        if (value > best) {
          best = value;
          pick = i;
        }
      }
      append_row(result.table,
                 {static_cast<double>(user), static_cast<double>(t),
                  static_cast<double>(pick), best});
      p = best == 0.0 ? p : step(p, catalog.item(pick),
                                 config.schedule.eta_at(t));
      last_item = pick;
    }
    final_prefs.push_back(p);
    final_item[user] = last_item;
  }

  // Pairwise angular dispersion before and after.
  double initial_pairwise = 0.0;
  double final_pairwise = 0.0;
  std::size_t pairs = 0;
  for (std::size_t a = 0; a < users; ++a) {
    for (std::size_t b = a + 1; b < users; ++b) {
      initial_pairwise += angle_between(initial[a].vec(), initial[b].vec());
      final_pairwise += angle_between(final_prefs[a].vec(), final_prefs[b].vec());
      ++pairs;
    }
  }
  initial_pairwise /= static_cast<double>(pairs);
  final_pairwise /= static_cast<double>(pairs);

  // Clusters keyed by the pole each user converged to: (item, sign).
  std::map<std::pair<std::size_t, int>, std::vector<std::size_t>> clusters;
  for (std::size_t user = 0; user < users; ++user) {
    const int sign =
        final_prefs[user].dot(catalog.item(final_item[user])) >= 0.0 ? 1 : -1;
    clusters[{final_item[user], sign}].push_back(user);
  }
  const auto mean_spread = [&](const std::vector<UnitVector>& prefs) {
    double total = 0.0;
    for (const auto& [key, members] : clusters) {
      Vector centroid = Vector::Zero(catalog.dim());
      for (const std::size_t u : members) centroid += prefs[u].vec();
      centroid.normalize();
      for (const std::size_t u : members) {
        total += angle_between(prefs[u].vec(), centroid);
      }
    }
    return total / static_cast<double>(users);
  };
  const double initial_spread = mean_spread(initial);
  const double final_spread = mean_spread(final_prefs);

  std::vector<std::size_t> distinct = final_item;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  json summary = base_summary(config, hash);
  summary["population"] = users;
  summary["initial_mean_pairwise_angle"] = initial_pairwise;
  summary["final_mean_pairwise_angle"] = final_pairwise;
  summary["distinct_converged_items"] = distinct.size();
  summary["initial_within_cluster_spread"] = initial_spread;
  summary["final_within_cluster_spread"] = final_spread;
  summary["spread_shrink_ratio"] =
      final_spread > 0.0 ? initial_spread / final_spread
                         : std::numeric_limits<double>::infinity();
  result.summary_json = summary.dump(2);
  return result;
}

// ---------------------------------------------------------------------------

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& raw) {
  const json j = raw;
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  const auto require = [&](const char* key) -> const json& {
    if (!j.contains(key)) {
      throw ConfigError(std::string("config is missing \"") + key + "\"");
    }
    return j.at(key);
  };

  ExperimentConfig config{
      scenario_from_name(require("scenario").get<std::string>()),
      require("dimension").get<Eigen::Index>(),
      std::nullopt,
      std::nullopt,
      [&]() {
        const json& s = require("schedule");
        const std::string kind = s.at("kind").get<std::string>();
        if (kind == "constant") {
          return StepSizeSchedule::constant(s.at("eta").get<double>());
        }
        if (kind == "decreasing") {
          return StepSizeSchedule::decreasing(s.at("eta").get<std::int64_t>(),
                                              s.at("s").get<std::int64_t>());
        }
        throw ConfigError("schedule kind must be constant or decreasing");
      }(),
  };
  if (config.dimension < 2) throw ConfigError("dimension must be >= 2");

  config.horizon = require("horizon").get<std::size_t>();
  if (config.horizon < 1) throw ConfigError("horizon must be >= 1");
  if (!j.contains("seed")) throw ConfigError("config is missing \"seed\"");
  config.seed = j.at("seed").get<std::uint64_t>();
  config.trials = j.value("trials", std::size_t{1});
  if (config.trials < 1) throw ConfigError("trials must be >= 1");
  config.noise_sigma = j.value("noise_sigma", 0.0);
  if (config.noise_sigma < 0.0) throw ConfigError("noise_sigma must be >= 0");

  const json& catalog = require("catalog");
  if (catalog.is_string()) {
    const std::string text = catalog.get<std::string>();
    std::size_t count = 0;
    unsigned long long catalog_seed = 0;
    if (std::sscanf(text.c_str(), "random:%zu:%llu", &count, &catalog_seed) !=
            2 ||
        count < 1) {
      throw ConfigError("catalog string must look like \"random:N:seed\"");
    }
    config.catalog_random = {count, static_cast<std::uint64_t>(catalog_seed)};
  } else if (catalog.is_array()) {
    Matrix columns(config.dimension, static_cast<Eigen::Index>(catalog.size()));
    for (std::size_t i = 0; i < catalog.size(); ++i) {
      columns.col(static_cast<Eigen::Index>(i)) =
          load_unit_vector(catalog[i], config.dimension);
    }
    config.catalog_vectors = columns;
  } else {
    throw ConfigError("catalog must be an array of vectors or \"random:N:seed\"");
  }

  if (j.contains("p0")) config.p0 = load_unit_vector(j.at("p0"), config.dimension);
  if (j.contains("item")) config.item = j.at("item").get<std::size_t>();
  if (j.contains("item2")) config.item2 = j.at("item2").get<std::size_t>();
  if (j.contains("exploration_steps")) {
    config.exploration_steps = j.at("exploration_steps").get<std::size_t>();
  }
  if (j.contains("gap")) config.gap = j.at("gap").get<double>();
  if (j.contains("alpha")) {
    config.alpha = vector_from_json(j.at("alpha"), -1);
  }
  if (j.contains("target")) {
    const json& target = j.at("target");
    if (target.is_array()) {
      config.target_v = load_unit_vector(target, config.dimension);
    } else if (target.is_object() && target.contains("index")) {
      config.target_item = target.at("index").get<std::size_t>();
    } else {
      throw ConfigError("target must be a vector or {\"index\": i}");
    }
  }
  config.delta = j.value("delta", 0.05);
  if (!(config.delta > 0.0) || config.delta >= 1.0) {
    throw ConfigError("delta must lie in (0, 1)");
  }
  if (j.contains("warm_start_steps")) {
    config.warm_start_steps = j.at("warm_start_steps").get<std::size_t>();
  }
  if (j.contains("subset_threshold")) {
    config.subset_threshold = j.at("subset_threshold").get<double>();
  }
  if (j.contains("plan")) {
    config.plan = j.at("plan").get<std::vector<std::size_t>>();
    if (config.plan->empty()) throw ConfigError("plan must be nonempty");
  }
  config.init_alignment = j.value("init_alignment", 0.95);
  if (j.contains("population")) {
    config.population = j.at("population").get<std::size_t>();
  }
  return config;
}

ExperimentConfig ExperimentConfig::from_file(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return from_json(j);
}

nlohmann::json ExperimentConfig::to_json() const {
  json j;
  j["scenario"] = scenario_name(scenario);
  j["dimension"] = dimension;
  if (catalog_vectors) {
    json cols = json::array();
    for (Eigen::Index i = 0; i < catalog_vectors->cols(); ++i) {
      cols.push_back(vector_to_json(catalog_vectors->col(i)));
    }
    j["catalog"] = cols;
  } else if (catalog_random) {
    j["catalog"] = "random:" + std::to_string(catalog_random->first) + ":" +
                   std::to_string(catalog_random->second);
  }
  if (schedule.kind() == StepSizeSchedule::Kind::Constant) {
    j["schedule"] = {{"kind", "constant"}, {"eta", schedule.eta()}};
  } else {
    j["schedule"] = {{"kind", "decreasing"},
                     {"eta", static_cast<std::int64_t>(schedule.eta())},
                     {"s", schedule.s()}};
  }
  j["horizon"] = horizon;
  j["trials"] = trials;
  j["seed"] = seed;
  j["noise_sigma"] = noise_sigma;
  if (p0) j["p0"] = vector_to_json(*p0);
  if (item) j["item"] = *item;
  if (item2) j["item2"] = *item2;
  if (exploration_steps) j["exploration_steps"] = *exploration_steps;
  if (gap) j["gap"] = *gap;
  if (alpha) j["alpha"] = vector_to_json(*alpha);
  if (target_v) j["target"] = vector_to_json(*target_v);
  if (target_item) j["target"] = {{"index", *target_item}};
  j["delta"] = delta;
  if (warm_start_steps) j["warm_start_steps"] = *warm_start_steps;
  if (subset_threshold) j["subset_threshold"] = *subset_threshold;
  if (plan) j["plan"] = *plan;
  j["init_alignment"] = init_alignment;
  if (population) j["population"] = *population;
  return j;
}

std::uint64_t config_hash(const ExperimentConfig& config) {
  const std::string canonical = config.to_json().dump();
  std::uint64_t hash = 0xcbf29ce484222325ull;  // FNV-1a
  for (const unsigned char c : canonical) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  return hash;
}

std::string to_csv(const ResultTable& table, std::uint64_t hash,
                   std::uint64_t seed) {
  std::string out;
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "# config_hash=%016llx seed=%llu\n",
                static_cast<unsigned long long>(hash),
                static_cast<unsigned long long>(seed));
  out += buffer;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out += table.columns[i].name;
    out += i + 1 < table.columns.size() ? "," : "\n";
  }
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) {
      throw InvariantBreachError("row width does not match the column count");
    }
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (!std::isfinite(row[i])) {
        throw InvariantBreachError("non-finite value in result row");
      }
      if (table.columns[i].integral) {
        std::snprintf(buffer, sizeof buffer, "%lld",
                      static_cast<long long>(row[i]));
      } else {
        std::snprintf(buffer, sizeof buffer, "%.17g", row[i]);
      }
      out += buffer;
      out += i + 1 < row.size() ? "," : "\n";
    }
  }
  return out;
}

RunResult run_experiment(const ExperimentConfig& config) {
  const std::uint64_t hash = config_hash(config);
  switch (config.scenario) {
    case Scenario::FixedRec: return run_fixed_rec(config, hash);
    case Scenario::RandomizedRec:
    case Scenario::DesignAndConverge: return run_randomized(config, hash);
    case Scenario::EtcRegret: return run_etc(config, hash);
    case Scenario::Identify: return run_identify(config, hash);
    case Scenario::ModeCollapse: return mode_collapse_population(config);
  }
  throw ConfigError("unknown scenario");
}

RunResult run_experiment_to_dir(const ExperimentConfig& config,
                                const std::filesystem::path& out_dir) {
  RunResult result = run_experiment(config);
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream csv(out_dir / "results.csv", std::ios::binary);
    if (!csv) throw Error("cannot write " + (out_dir / "results.csv").string());
    csv << to_csv(result.table, result.config_hash, config.seed);
  }
  {
    std::ofstream summary(out_dir / "summary.json", std::ios::binary);
    if (!summary) {
      throw Error("cannot write " + (out_dir / "summary.json").string());
    }
    summary << result.summary_json << "\n";
  }
  return result;
}

}  // namespace prefdyn
