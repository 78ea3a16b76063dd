#pragma once

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <optional>
#include <utility>
#include <vector>

#include "rpcc/dataset.hpp"
#include "rpcc/weights.hpp"

namespace rpcc {

/// min_X 1/2 sum_i ||x_i - a_i||^2 + gamma sum_{(i,j) in E} w_ij ||x_i - x_j||
/// for data A (original or embedded) and the edges of `graph`.
struct ProblemInstance {
  const DataMatrix& data;
  const WeightGraph& graph;
  double gamma = 0.0;
};

struct SolverSettings {
  double tol = 1e-6;  // relative duality gap
  int max_iter = 20000;
  double rho = 1.0;
  /// Rows closer than this are merged on extraction; default is
  /// 1e-5 * median edge length of the data, floored at 1e-12.
  std::optional<double> tau_merge;
  /// Duality gap evaluation period (iterations).
  int check_every = 10;
  /// When > 0, convergence also needs the ADMM residuals ||BX - Z|| and
  /// rho ||B^T (Z - Z_prev)|| below this value. The gap bounds the objective
  /// error only, so the iterate itself is accurate to about sqrt(tol).
  double residual_tol = 0.0;

  void validate() const;
};

struct SolveResult {
  double gamma = 0.0;
  Matrix X;                // n x dim, row i = x_i*
  Matrix dual_edge_vars;   // |E| x dim, ||z_e|| <= gamma w_e
  double primal_obj = 0.0;
  double dual_obj = 0.0;
  double rel_gap = 0.0;    // |primal - dual| / (1 + |primal| + |dual|)
  int iterations = 0;
  bool success = false;
  /// Edges whose split variable is exactly zero, as (i, j) with i < j.
  PairList fused_edges;
  double tau_merge = 0.0;
};

double objective_value(const ProblemInstance& inst, const Matrix& X);

/// <A, B^T Z> - 1/2 ||B^T Z||^2 for dual edge variables already inside their
/// balls.
double dual_value(const ProblemInstance& inst, const Matrix& Z);

double relative_gap(double primal, double dual);

double default_tau_merge(const DataMatrix& data, const WeightGraph& graph);

/// ADMM on the edge split z_e = x_i - x_j. The system matrix I + rho B^T B
/// is factorised once; successive `solve` calls warm start from the previous
/// iterate, which is what a descending gamma sweep wants.
class ConvexClusteringSolver {
 public:
  ConvexClusteringSolver(const DataMatrix& data, const WeightGraph& graph,
                         SolverSettings settings = {});

  SolveResult solve(double gamma);
  /// Forget the warm start.
  void reset();

  const SolverSettings& settings() const { return settings_; }
  double tau_merge() const { return tau_merge_; }

 private:
  void x_update();
  double gap_check(const ProblemInstance& inst, SolveResult& out);

  const DataMatrix& data_;
  const WeightGraph& graph_;
  SolverSettings settings_;
  double tau_merge_ = 0.0;

  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> factor_;
  Matrix BA_;  // edge differences of the data
  Matrix X_, Z_, U_, Z_prev_;
  Matrix work_edges_, work_nodes_;
  Eigen::MatrixXd rhs_;
  std::vector<double> thresholds_;
  bool warm_ = false;
};

/// Single solve from a cold start.
SolveResult solve(const ProblemInstance& inst, const SolverSettings& settings = {});

/// Connected components of the fused edges plus all pairs with
/// ||x_i - x_j|| <= tau_merge; clusters numbered by smallest member.
Partition extract_partition(const SolveResult& result);

}  // namespace rpcc
