#pragma once

#include <vector>

#include "rpcc/dataset.hpp"

namespace rpcc {

/// counts(i, j) = |candidate cluster i+1 ∩ truth cluster j+1|.
struct ContingencyTable {
  Eigen::MatrixXd counts;
  std::vector<double> row_sums;
  std::vector<double> col_sums;
  Index n = 0;

  ContingencyTable(const Partition& candidate, const Partition& truth);
};

double rand_index(const Partition& p1, const Partition& p2);

/// Hubert-Arabie adjusted Rand index; 1 when the index is degenerate (M = E).
double adjusted_rand_index(const Partition& p1, const Partition& p2);

/// Fraction of points on the diagonal under the best one-to-one matching of
/// candidate to truth clusters.
double accuracy(const Partition& p1, const Partition& truth);

/// Maximum-weight assignment on a rectangular score matrix, padded to square
/// internally. Returns the column matched to each row, -1 for padding.
std::vector<int> max_weight_assignment(const Eigen::MatrixXd& score);

}  // namespace rpcc
