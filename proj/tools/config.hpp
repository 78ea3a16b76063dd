#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rpcc/baseline.hpp"
#include "rpcc/bounds.hpp"
#include "rpcc/projection.hpp"
#include "rpcc/solver.hpp"

namespace rpcc::cli {

using nlohmann::json;

enum class DataKind { Csv, Mixture, Unbalanced, Inline };
enum class GraphMode { Knn, Oracle, Uniform, Csv };

struct DataConfig {
  DataKind kind = DataKind::Mixture;
  std::filesystem::path csv;
  CsvOptions csv_options;
  MixtureSpec mixture;
  Index unbalanced_d = 200, large = 200, small = 10;
  Seed unbalanced_seed = 0;
  Matrix points;
  std::vector<long> labels;
};

struct WeightConfig {
  GraphMode mode = GraphMode::Knn;
  Index k = 10;
  std::optional<double> phi;  // 1/d when absent
  std::filesystem::path csv;
};

struct ProjectionConfig {
  bool present = false;
  ProjectionFamily family = ProjectionFamily::Gaussian;
  double C = 9.0;
  bool logk = false;
  std::vector<Index> dims;
  std::vector<double> epsilons;
  Seed seed = 0;
  int trials = 1;
};

struct BoundsConfig {
  double p = 2.0;
  double C = 9.0;
  double C_logk = 10.0;
  SubgaussianProfile profile;
  std::vector<double> epsilons{0.2, 0.4, 0.6, 0.8, 0.95};
  std::vector<double> epsilons_logk;
};

struct VerifyConfig {
  std::vector<double> epsilons{0.2};
  int trials = 1000;
  double C = 9.0;
};

/// One experiment, resolved from a JSON file plus command-line overrides.
struct ExperimentConfig {
  Seed seed = 0;
  DataConfig data;
  WeightConfig weights;
  ProjectionConfig projection;
  std::vector<double> grid;
  std::string grid_text = "[10:-0.2:2]";
  std::optional<double> gamma;
  SolverSettings solver;
  BoundsConfig bounds;
  std::optional<int> kmeans_K;
  KMeansConfig kmeans;
  VerifyConfig verify;

  /// The document the config was read from, with the effective seed.
  json resolved;
  std::string hash;  // 16 hex digits
};

/// Throws ValidationError listing every violated field.
ExperimentConfig load_config(const json& doc, std::optional<Seed> seed_override,
                             const std::filesystem::path& base_dir);

/// Embedding dimensions requested by the projection block for n points and
/// K clusters.
std::vector<Index> projection_dims(const ProjectionConfig& cfg, Index n, int K);

/// Seed of projection trial `trial` at dimension m.
Seed projection_seed(const ProjectionConfig& cfg, Index m, int trial);

}  // namespace rpcc::cli
