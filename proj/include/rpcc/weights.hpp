#pragma once

#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "rpcc/dataset.hpp"
#include "rpcc/kernels.hpp"

namespace rpcc {

/// Sparse symmetric fusion weights. Each unordered pair is stored once with
/// i < j; pairs without an edge have weight 0.
class WeightGraph {
 public:
  WeightGraph() = default;
  /// Edges may arrive in any order and orientation; they are normalised to
  /// i < j and sorted. Duplicate pairs, self loops and negative weights throw.
  WeightGraph(Index n, std::vector<Edge> edges);

  Index n() const noexcept { return n_; }
  Index num_edges() const noexcept { return static_cast<Index>(edges_.size()); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const Incidence& incidence() const noexcept { return incidence_; }

  /// w_ij (0 when absent); symmetric in its arguments.
  double weight(Index i, Index j) const;
  bool has_edge(Index i, Index j) const;

  /// Dense weights from node i to every node (scratch-friendly row query).
  void weight_row(Index i, std::vector<double>& row) const;

  /// Triplets `i,j,w` with 1-based indices and i < j.
  std::string to_csv() const;
  static WeightGraph from_csv(const std::string& text, Index n);

 private:
  Index find_edge(Index i, Index j) const;

  Index n_ = 0;
  std::vector<Edge> edges_;
  Incidence incidence_;
};

/// Gaussian kernel exp(-phi ||a_i - a_j||^2) on the symmetric k-NN graph:
/// (i, j) is an edge when either point is among the other's k nearest
/// neighbours (ties broken by lower index).
WeightGraph knn_gaussian_weights(const DataMatrix& data, Index k, double phi);
/// phi = 1 / d.
WeightGraph knn_gaussian_weights(const DataMatrix& data, Index k);

/// Complete graph with unit weights.
WeightGraph uniform_weights(Index n);

/// k-NN edges united with every within-cluster pair, Gaussian weights on all.
WeightGraph oracle_experiment_graph(const DataMatrix& data, const Partition& truth, Index k,
                                    double phi);

struct AssumptionReport {
  bool holds = false;
  /// min over in-cluster pairs of n_alpha w_ij - mu_ij; +inf when no cluster
  /// has two members.
  double margin = std::numeric_limits<double>::infinity();
  int worst_cluster = 0;  // alpha, 1-based; 0 when no pair exists
  Index worst_i = -1;
  Index worst_j = -1;
  bool all_positive = true;  // every in-cluster w_ij > 0
};

/// Table quantities w_i^(beta) and mu_ij^(alpha) for a fixed graph and
/// partition.
class ClusterWeightSums {
 public:
  ClusterWeightSums(const WeightGraph& graph, const Partition& truth);

  /// w_i^(beta) = sum_{j in I_beta} w_ij, beta 1-based.
  double node_to_cluster(Index i, int beta) const { return per_node_(i, beta - 1); }
  /// mu_ij^(alpha) = sum_{beta != alpha} |w_i^(beta) - w_j^(beta)|.
  double mu(Index i, Index j, int alpha) const;
  /// w^(alpha,beta) = sum_{i in I_alpha} sum_{j in I_beta} w_ij.
  double between(int alpha, int beta) const { return between_(alpha - 1, beta - 1); }
  /// wbar^(beta) = (1/n_beta) sum_{l != beta} w^(beta,l).
  double mean_external(int beta) const;

 private:
  std::vector<Index> sizes_;
  Eigen::MatrixXd per_node_;
  Eigen::MatrixXd between_;
};

AssumptionReport check_assumption2(const WeightGraph& graph, const Partition& truth);

}  // namespace rpcc
