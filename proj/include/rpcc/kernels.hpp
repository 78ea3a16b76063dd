#pragma once

// Data-parallel inner loops. Every kernel exists twice: `serial::` is the
// reference implementation used by the tests, `omp::` is the OpenMP version
// used by the library. Both produce bit-identical results.

#include <span>
#include <utility>
#include <vector>

#include "rpcc/types.hpp"

namespace rpcc {

/// Undirected weighted edge, stored once with i < j (0-based).
struct Edge {
  Index i = 0;
  Index j = 0;
  double w = 0.0;
};

/// Node -> incident edges in CSR form. `sign` is +1 when the node is the
/// edge's `i` end, -1 for its `j` end. Entries of a node are ordered by edge
/// index.
struct Incidence {
  struct Entry {
    Index edge;
    double sign;
  };
  std::vector<Index> offsets;  // size n + 1
  std::vector<Entry> entries;

  static Incidence build(Index n, std::span<const Edge> edges);
  Index n() const { return static_cast<Index>(offsets.size()) - 1; }
};

using PairList = std::vector<std::pair<Index, Index>>;

namespace kernels {

inline double sq_dist(const Matrix& X, Index a, const Matrix& Y, Index b) {
  return (X.row(a) - Y.row(b)).squaredNorm();
}

/// Result of per-pair distortion checks.
struct DistortionCount {
  Index preserved = 0;
  std::vector<std::pair<Index, double>> violations;  // (pair index, ratio)
};

namespace serial {

/// For each row, its k nearest other rows ordered by (distance, index).
std::vector<std::vector<Index>> knn(const Matrix& X, Index k);

/// out.row(e) = X.row(edges[e].i) - X.row(edges[e].j)
void edge_differences(const Matrix& X, std::span<const Edge> edges, Matrix& out);

/// out = B^T Z where (B X)_e = x_i - x_j.
void incidence_transpose(const Matrix& Z, std::span<const Edge> edges, Index n, Matrix& out);

/// Row-wise prox of t * ||.||: Z.row(e) = max(0, 1 - t_e / ||V.row(e)||) V.row(e).
/// Returns the number of rows set to exactly zero.
Index block_soft_threshold(const Matrix& V, std::span<const double> thresholds, Matrix& Z);

/// Counts pairs with (1-eps) ref_sq[p] <= ||P_i - P_j||^2 <= (1+eps) ref_sq[p].
DistortionCount count_preserved(const Matrix& P, const PairList& pairs,
                                std::span<const double> ref_sq, double eps,
                                bool record_violations = false);

/// Nearest centroid for each row (ties to the lower centroid index).
/// Returns the sum of squared distances.
double assign_nearest(const Matrix& X, const Matrix& centroids, std::vector<int>& labels,
                      std::vector<double>& min_sq);

}  // namespace serial

namespace omp {

std::vector<std::vector<Index>> knn(const Matrix& X, Index k);
void edge_differences(const Matrix& X, std::span<const Edge> edges, Matrix& out);
void incidence_transpose(const Matrix& Z, const Incidence& inc, Matrix& out);
Index block_soft_threshold(const Matrix& V, std::span<const double> thresholds, Matrix& Z);
DistortionCount count_preserved(const Matrix& P, const PairList& pairs,
                                std::span<const double> ref_sq, double eps,
                                bool record_violations = false);
double assign_nearest(const Matrix& X, const Matrix& centroids, std::vector<int>& labels,
                      std::vector<double>& min_sq);

}  // namespace omp

int max_threads();

}  // namespace kernels
}  // namespace rpcc
