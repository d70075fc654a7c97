#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "prefdyn/design.hpp"
#include "prefdyn/identification.hpp"
#include "prefdyn/policies.hpp"

namespace prefdyn {

enum class Scenario {
  FixedRec,
  RandomizedRec,
  EtcRegret,
  DesignAndConverge,
  Identify,
  ModeCollapse,
};

/// Configuration-driven experiment description, loaded from JSON. Every
/// random draw in a run traces back to `seed` through (seed, trial, tag)
/// counter streams, so identical configs produce identical outputs.
struct ExperimentConfig {
  Scenario scenario;
  Eigen::Index dimension;
  std::optional<Matrix> catalog_vectors;  // explicit columns
  std::optional<std::pair<std::size_t, std::uint64_t>> catalog_random;  // N, seed
  StepSizeSchedule schedule;
  std::size_t horizon = 0;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  double noise_sigma = 0.0;
  std::optional<Vector> p0;  // absent: sampled per trial

  // FixedRec / EtcRegret
  std::optional<std::size_t> item;
  std::optional<std::size_t> item2;
  std::optional<std::size_t> exploration_steps;
  std::optional<double> gap;

  // RandomizedRec / DesignAndConverge
  std::optional<Vector> alpha;
  std::optional<Vector> target_v;          // design target vector
  std::optional<std::size_t> target_item;  // or catalog index
  double delta = 0.05;
  std::optional<std::size_t> warm_start_steps;
  std::optional<double> subset_threshold;

  // Identify
  std::optional<std::vector<std::size_t>> plan;  // absent: random indices
  double init_alignment = 0.95;

  // ModeCollapse
  std::optional<std::size_t> population;  // M users

  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig from_file(const std::filesystem::path& path);
  nlohmann::json to_json() const;
};

struct ResultColumn {
  std::string name;
  bool integral = false;
};

/// Flat result table; one row per (trial, t). All values are finite.
struct ResultTable {
  std::vector<ResultColumn> columns;
  std::vector<std::vector<double>> rows;
};

struct RunResult {
  ResultTable table;
  std::string summary_json;  // pretty-printed summary document
  std::uint64_t config_hash;
};

/// Executes a scenario deterministically. Throws ConfigError on an invalid
/// configuration, InfeasibleError when a design scenario has no solution,
/// and InvariantBreachError if a runtime check fails.
RunResult run_experiment(const ExperimentConfig& config);

/// run_experiment plus CSV and summary emission into out_dir as
/// results.csv / summary.json.
RunResult run_experiment_to_dir(const ExperimentConfig& config,
                                const std::filesystem::path& out_dir);

/// Multi-user simulation with per-step argmax personalization; emits one
/// row per (user, t) and dispersion statistics in the summary. Dispatched
/// by run_experiment for Scenario::ModeCollapse.
RunResult mode_collapse_population(const ExperimentConfig& config);

/// CSV serialization used by run_experiment_to_dir: a comment header with
/// the config hash and seed, then the column row, then data with
/// 17-significant-digit floats. Rejects NaN/Inf with InvariantBreachError.
std::string to_csv(const ResultTable& table, std::uint64_t config_hash,
                   std::uint64_t seed);

/// FNV-1a over the canonicalized config document.
std::uint64_t config_hash(const ExperimentConfig& config);

/// Desk-scale battery of the library's cross-module invariants; prints one
/// line per check and returns false if any failed.
bool run_invariant_checks(std::ostream& out);

}  // namespace prefdyn
