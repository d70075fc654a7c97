#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>

#include "prefdyn/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitInvariant = 4;

prefdyn::Matrix load_catalog_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw prefdyn::ConfigError("cannot open catalog file " + path.string());
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw prefdyn::ConfigError(std::string("catalog is not valid JSON: ") +
                               e.what());
  }
  const nlohmann::json& vectors =
      j.is_object() && j.contains("vectors") ? j.at("vectors") : j;
  if (!vectors.is_array() || vectors.empty() || !vectors[0].is_array()) {
    throw prefdyn::ConfigError(
        "catalog file must hold an array of vectors (or {\"vectors\": [...]})");
  }
  const auto d = static_cast<Eigen::Index>(vectors[0].size());
  prefdyn::Matrix columns(d, static_cast<Eigen::Index>(vectors.size()));
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (static_cast<Eigen::Index>(vectors[i].size()) != d) {
      throw prefdyn::ConfigError("catalog vectors must share one dimension");
    }
    for (Eigen::Index r = 0; r < d; ++r) {
      columns(r, static_cast<Eigen::Index>(i)) = vectors[i][r].get<double>();
    }
  }
  return columns;
}

// Target syntax: a catalog index ("2") or a comma-separated vector
// ("0.6,0.8"), normalized on load.
prefdyn::UnitVector parse_target(const std::string& text,
                                 const prefdyn::ItemCatalog& catalog) {
  if (text.find(',') == std::string::npos) {
    std::size_t parsed = 0;
    const unsigned long index = std::stoul(text, &parsed);
    if (parsed != text.size()) {
      throw prefdyn::ConfigError("target must be an index or a vector");
    }
    return catalog.item(index);
  }
  std::vector<double> values;
  std::stringstream stream(text);
  std::string piece;
  while (std::getline(stream, piece, ',')) {
    values.push_back(std::stod(piece));
  }
  prefdyn::Vector v(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = values[i];
  }
  const double norm = v.norm();
  if (std::abs(norm - 1.0) > 1e-9) {
    throw prefdyn::ConfigError("target vector must be unit norm within 1e-9");
  }
  return prefdyn::UnitVector(v / norm);
}

int run_command(const std::string& config_path, const std::string& out_dir) {
  const prefdyn::ExperimentConfig config =
      prefdyn::ExperimentConfig::from_file(config_path);
  const prefdyn::RunResult result =
      prefdyn::run_experiment_to_dir(config, out_dir);
  std::cout << "wrote " << (std::filesystem::path(out_dir) / "results.csv").string()
            << " (" << result.table.rows.size() << " rows) and summary.json\n";
  return kExitOk;
}

int design_command(const std::string& catalog_path, const std::string& target,
                   const std::string& out_path, double threshold,
                   bool use_subset) {
  const prefdyn::ItemCatalog catalog(load_catalog_file(catalog_path));
  const prefdyn::UnitVector v = parse_target(target, catalog);

  std::vector<std::size_t> indices(catalog.size());
  std::iota(indices.begin(), indices.end(), 0);
  if (use_subset) {
    indices = prefdyn::select_self_aligned_subset(catalog, v, threshold);
  }
  std::vector<prefdyn::UnitVector> selected;
  for (const std::size_t i : indices) selected.push_back(catalog.item(i));
  const prefdyn::ItemCatalog restricted{selected};

  const prefdyn::DesignSolution solution =
      prefdyn::maximize_eigengap(restricted, v);

  nlohmann::ordered_json j;
  auto to_array = [](const prefdyn::Vector& values) {
    nlohmann::ordered_json a = nlohmann::ordered_json::array();
    for (Eigen::Index i = 0; i < values.size(); ++i) a.push_back(values[i]);
    return a;
  };
  j["x"] = to_array(solution.x);
  j["alpha"] = to_array(solution.alpha);
  j["lambda1"] = solution.lambda1;
  j["residual"] = solution.residual;
  j["dominant"] = solution.dominant;
  j["eigengap"] = solution.eigengap;
  j["self_aligned_support"] = solution.self_aligned_support;
  nlohmann::ordered_json idx = nlohmann::ordered_json::array();
  for (const std::size_t i : indices) idx.push_back(i);
  j["subset_indices"] = idx;

  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw prefdyn::Error("cannot write " + out_path);
  out << j.dump(2) << "\n";
  std::cout << "wrote " << out_path << " (eigengap " << solution.eigengap
            << ")\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"prefdyn — preference-dynamics experiment runner"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out";
  CLI::App* run = app.add_subcommand("run", "execute a configured experiment");
  run->add_option("--config", config_path, "experiment config (JSON)")
      ->required();
  run->add_option("--out", out_dir, "output directory");

  std::string catalog_path, target, design_out = "design.json";
  double threshold = 0.0;
  bool use_subset = false;
  CLI::App* design = app.add_subcommand(
      "design", "choose randomization weights for a target direction");
  design->add_option("--catalog", catalog_path, "catalog file (JSON vectors)")
      ->required();
  design->add_option("--target", target, "target vector (comma separated) or index")
      ->required();
  design->add_option("--out", design_out, "output path for the solution JSON");
  design->add_option("--subset-threshold", threshold,
                     "restrict to a self-aligned subset at this alignment");
  design->add_flag("--subset", use_subset,
                   "apply the self-aligned subset heuristic before designing");

  CLI::App* check = app.add_subcommand("check", "run the invariant suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (run->parsed()) return run_command(config_path, out_dir);
    if (design->parsed()) {
      return design_command(catalog_path, target, design_out, threshold,
                            use_subset || threshold > 0.0);
    }
    if (check->parsed()) {
      const bool ok = prefdyn::run_invariant_checks(std::cout);
      std::cout << (ok ? "all checks passed\n" : "checks FAILED\n");
      return ok ? kExitOk : kExitInvariant;
    }
  } catch (const prefdyn::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const prefdyn::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const prefdyn::NoDominantFeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const prefdyn::InvariantBreachError& e) {
    std::cerr << "invariant breach: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
