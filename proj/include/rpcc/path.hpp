#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rpcc/bounds.hpp"
#include "rpcc/solver.hpp"

namespace rpcc {

/// Expands a grid such as "[10:-0.1:0.1]", "0.5, 1, 2" or a comma separated
/// union of both. Ranges include both ends when the step divides the span and
/// stop short of the far end otherwise.
std::vector<double> parse_grid(std::string_view text);

/// a, a+s, ... towards b.
std::vector<double> expand_range(double a, double s, double b);

struct PathPoint {
  double gamma = 0.0;
  int K_found = 0;
  Partition partition;
  // NaN when no truth was given.
  double rand_index = 0.0;
  double adjusted_rand_index = 0.0;
  double accuracy = 0.0;
  double rel_gap = 0.0;
  int iterations = 0;
  bool success = false;
};

struct ClusteringPath {
  std::vector<PathPoint> points;  // strictly descending gamma
  std::vector<double> grid;       // as given
  std::uint64_t instance_hash = 0;
  SolverSettings settings;
  /// Grid gammas (descending order) where K_found rose while gamma grew.
  std::vector<double> monotonicity_violations;

  bool all_converged() const;
  /// gamma,K_found,RI,ARI,accuracy,rel_gap
  std::string to_csv() const;
};

/// FNV-1a over the data entries and the weighted edges.
std::uint64_t instance_fingerprint(const DataMatrix& data, const WeightGraph& graph);

/// Solves at every grid value in descending order with warm starts. A solve
/// that hits max_iter is kept and flagged (success = false).
ClusteringPath sweep(const DataMatrix& data, const WeightGraph& graph, std::vector<double> grid,
                     const Partition* truth = nullptr, const SolverSettings& settings = {});

struct RecoveryReport {
  /// Grid gammas whose partition equals the truth as a set partition,
  /// ascending.
  std::vector<double> gammas;
  /// Set when an interval was given.
  std::optional<bool> interval_recovered;
  /// No grid value fell inside the interval; interval_recovered is then true.
  bool vacuous = false;
  std::string warning;
  /// Largest gamma of the contiguous recovering run that starts at the
  /// smallest recovering grid value.
  std::optional<double> practical_upper;
};

RecoveryReport detect_perfect_recovery(const ClusteringPath& path, const Partition& truth,
                                       const std::optional<GammaInterval>& interval = std::nullopt);

struct CoarseningCheck {
  bool coarsening = false;
  bool nontrivial = false;
};

/// Every truth cluster lies inside one candidate cluster; nontrivial when the
/// candidate also has more than one cluster.
CoarseningCheck is_coarsening(const Partition& candidate, const Partition& truth);

}  // namespace rpcc
