#include "rpcc/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "rpcc/error.hpp"

namespace rpcc {

Incidence Incidence::build(Index n, std::span<const Edge> edges) {
  Incidence inc;
  inc.offsets.assign(static_cast<std::size_t>(n) + 1, 0);
  for (const auto& e : edges) {
    ++inc.offsets[static_cast<std::size_t>(e.i) + 1];
    ++inc.offsets[static_cast<std::size_t>(e.j) + 1];
  }
  std::partial_sum(inc.offsets.begin(), inc.offsets.end(), inc.offsets.begin());
  inc.entries.resize(static_cast<std::size_t>(inc.offsets.back()));
  std::vector<Index> cursor(inc.offsets.begin(), inc.offsets.end() - 1);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    inc.entries[static_cast<std::size_t>(cursor[static_cast<std::size_t>(edges[e].i)]++)] = {
        static_cast<Index>(e), 1.0};
    inc.entries[static_cast<std::size_t>(cursor[static_cast<std::size_t>(edges[e].j)]++)] = {
        static_cast<Index>(e), -1.0};
  }
  return inc;
}

namespace kernels {

namespace {

void check_k(const Matrix& X, Index k) {
  if (k < 1 || k >= X.rows()) throw ParameterError("knn needs 1 <= k < n");
}

std::vector<Index> knn_row(const Matrix& X, Index i, Index k,
                           std::vector<std::pair<double, Index>>& scratch) {
  scratch.clear();
  for (Index j = 0; j < X.rows(); ++j) {
    if (j != i) scratch.emplace_back(sq_dist(X, i, X, j), j);
  }
  std::partial_sort(scratch.begin(), scratch.begin() + k, scratch.end());
  std::vector<Index> out(static_cast<std::size_t>(k));
  for (Index r = 0; r < k; ++r) out[static_cast<std::size_t>(r)] = scratch[static_cast<std::size_t>(r)].second;
  return out;
}

inline void soft_row(const Matrix& V, Index e, double t, Matrix& Z, Index& zeros) {
  const double norm = V.row(e).norm();
  if (norm <= t) {
    Z.row(e).setZero();
    ++zeros;
  } else {
    Z.row(e) = (1.0 - t / norm) * V.row(e);
  }
}

inline bool preserved(double proj, double ref, double eps) {
  return (1.0 - eps) * ref <= proj && proj <= (1.0 + eps) * ref;
}

inline void nearest_row(const Matrix& X, const Matrix& C, Index i, int& label, double& best) {
  best = std::numeric_limits<double>::infinity();
  label = 0;
  for (Index c = 0; c < C.rows(); ++c) {
    const double dist = sq_dist(X, i, C, c);
    if (dist < best) {
      best = dist;
      label = static_cast<int>(c);
    }
  }
}

}  // namespace

namespace serial {

std::vector<std::vector<Index>> knn(const Matrix& X, Index k) {
  check_k(X, k);
  std::vector<std::vector<Index>> out(static_cast<std::size_t>(X.rows()));
  std::vector<std::pair<double, Index>> scratch;
  for (Index i = 0; i < X.rows(); ++i) out[static_cast<std::size_t>(i)] = knn_row(X, i, k, scratch);
  return out;
}

void edge_differences(const Matrix& X, std::span<const Edge> edges, Matrix& out) {
  out.resize(static_cast<Index>(edges.size()), X.cols());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    out.row(static_cast<Index>(e)) = X.row(edges[e].i) - X.row(edges[e].j);
  }
}

void incidence_transpose(const Matrix& Z, std::span<const Edge> edges, Index n, Matrix& out) {
  out.setZero(n, Z.cols());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    out.row(edges[e].i) += Z.row(static_cast<Index>(e));
    out.row(edges[e].j) -= Z.row(static_cast<Index>(e));
  }
}

Index block_soft_threshold(const Matrix& V, std::span<const double> thresholds, Matrix& Z) {
  Z.resize(V.rows(), V.cols());
  Index zeros = 0;
  for (Index e = 0; e < V.rows(); ++e) soft_row(V, e, thresholds[static_cast<std::size_t>(e)], Z, zeros);
  return zeros;
}

DistortionCount count_preserved(const Matrix& P, const PairList& pairs,
                                std::span<const double> ref_sq, double eps,
                                bool record_violations) {
  DistortionCount out;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const double proj = sq_dist(P, pairs[p].first, P, pairs[p].second);
    if (preserved(proj, ref_sq[p], eps)) {
      ++out.preserved;
    } else if (record_violations) {
      out.violations.emplace_back(static_cast<Index>(p), proj / ref_sq[p]);
    }
  }
  return out;
}

double assign_nearest(const Matrix& X, const Matrix& centroids, std::vector<int>& labels,
                      std::vector<double>& min_sq) {
  labels.resize(static_cast<std::size_t>(X.rows()));
  min_sq.resize(static_cast<std::size_t>(X.rows()));
  double total = 0.0;
  for (Index i = 0; i < X.rows(); ++i) {
    const auto s = static_cast<std::size_t>(i);
    nearest_row(X, centroids, i, labels[s], min_sq[s]);
    total += min_sq[s];
  }
  return total;
}

}  // namespace serial

namespace omp {

std::vector<std::vector<Index>> knn(const Matrix& X, Index k) {
  check_k(X, k);
  const Index n = X.rows();
  std::vector<std::vector<Index>> out(static_cast<std::size_t>(n));
#pragma omp parallel
  {
    std::vector<std::pair<double, Index>> scratch;
#pragma omp for schedule(dynamic, 16)
    for (Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = knn_row(X, i, k, scratch);
  }
  return out;
}

void edge_differences(const Matrix& X, std::span<const Edge> edges, Matrix& out) {
  const auto m = static_cast<Index>(edges.size());
  out.resize(m, X.cols());
#pragma omp parallel for schedule(static)
  for (Index e = 0; e < m; ++e) {
    const auto& ed = edges[static_cast<std::size_t>(e)];
    out.row(e) = X.row(ed.i) - X.row(ed.j);
  }
}

void incidence_transpose(const Matrix& Z, const Incidence& inc, Matrix& out) {
  const Index n = inc.n();
  out.setZero(n, Z.cols());
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) {
    for (Index p = inc.offsets[static_cast<std::size_t>(i)]; p < inc.offsets[static_cast<std::size_t>(i) + 1]; ++p) {
      const auto& entry = inc.entries[static_cast<std::size_t>(p)];
      if (entry.sign > 0) {
        out.row(i) += Z.row(entry.edge);
      } else {
        out.row(i) -= Z.row(entry.edge);
      }
    }
  }
}

Index block_soft_threshold(const Matrix& V, std::span<const double> thresholds, Matrix& Z) {
  Z.resize(V.rows(), V.cols());
  Index zeros = 0;
  const Index m = V.rows();
#pragma omp parallel for schedule(static) reduction(+ : zeros)
  for (Index e = 0; e < m; ++e) soft_row(V, e, thresholds[static_cast<std::size_t>(e)], Z, zeros);
  return zeros;
}

DistortionCount count_preserved(const Matrix& P, const PairList& pairs,
                                std::span<const double> ref_sq, double eps,
                                bool record_violations) {
  const auto np = static_cast<Index>(pairs.size());
  std::vector<char> ok(pairs.size());
  std::vector<double> ratio(record_violations ? pairs.size() : 0);
#pragma omp parallel for schedule(static)
  for (Index p = 0; p < np; ++p) {
    const auto s = static_cast<std::size_t>(p);
    const double proj = sq_dist(P, pairs[s].first, P, pairs[s].second);
    ok[s] = preserved(proj, ref_sq[s], eps) ? 1 : 0;
    if (record_violations) ratio[s] = proj / ref_sq[s];
  }
  DistortionCount out;
  for (std::size_t s = 0; s < pairs.size(); ++s) {
    if (ok[s]) {
      ++out.preserved;
    } else if (record_violations) {
      out.violations.emplace_back(static_cast<Index>(s), ratio[s]);
    }
  }
  return out;
}

double assign_nearest(const Matrix& X, const Matrix& centroids, std::vector<int>& labels,
                      std::vector<double>& min_sq) {
  const Index n = X.rows();
  labels.resize(static_cast<std::size_t>(n));
  min_sq.resize(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) {
    const auto s = static_cast<std::size_t>(i);
    nearest_row(X, centroids, i, labels[s], min_sq[s]);
  }
  // Serial sum keeps the result independent of the thread count.
  double total = 0.0;
  for (double v : min_sq) total += v;
  return total;
}

}  // namespace omp

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace kernels
}  // namespace rpcc
