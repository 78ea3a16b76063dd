#include "rpcc/metrics.hpp"

#include <algorithm>
#include <limits>

#include "rpcc/error.hpp"

namespace rpcc {

namespace {

double choose2(double x) { return 0.5 * x * (x - 1.0); }

void check_sizes(const Partition& a, const Partition& b, Index min_n) {
  if (a.n() != b.n()) throw ParameterError("partitions have different sizes");
  if (a.n() < min_n) throw ParameterError("need at least " + std::to_string(min_n) + " points");
}

struct PairSums {
  double index = 0.0;  // sum_ij C(n_ij, 2)
  double rows = 0.0;   // sum_i C(a_i, 2)
  double cols = 0.0;   // sum_j C(b_j, 2)
  double total = 0.0;  // C(n, 2)
};

PairSums pair_sums(const ContingencyTable& t) {
  PairSums s;
  for (Index i = 0; i < t.counts.rows(); ++i)
    for (Index j = 0; j < t.counts.cols(); ++j) s.index += choose2(t.counts(i, j));
  for (double a : t.row_sums) s.rows += choose2(a);
  for (double b : t.col_sums) s.cols += choose2(b);
  s.total = choose2(static_cast<double>(t.n));
  return s;
}

}  // namespace

ContingencyTable::ContingencyTable(const Partition& candidate, const Partition& truth) {
  check_sizes(candidate, truth, 1);
  n = candidate.n();
  counts = Eigen::MatrixXd::Zero(candidate.K(), truth.K());
  for (Index i = 0; i < n; ++i) counts(candidate.label(i) - 1, truth.label(i) - 1) += 1.0;
  row_sums.resize(static_cast<std::size_t>(candidate.K()));
  col_sums.resize(static_cast<std::size_t>(truth.K()));
  for (Index i = 0; i < counts.rows(); ++i) row_sums[static_cast<std::size_t>(i)] = counts.row(i).sum();
  for (Index j = 0; j < counts.cols(); ++j) col_sums[static_cast<std::size_t>(j)] = counts.col(j).sum();
}

double rand_index(const Partition& p1, const Partition& p2) {
  check_sizes(p1, p2, 2);
  const auto s = pair_sums(ContingencyTable(p1, p2));
  // agreements = same-same + different-different
  return (s.total + 2.0 * s.index - s.rows - s.cols) / s.total;
}

double adjusted_rand_index(const Partition& p1, const Partition& p2) {
  check_sizes(p1, p2, 2);
  const auto s = pair_sums(ContingencyTable(p1, p2));
  // (index - E) / (M - E) scaled by C(n, 2); every term is an integer.
  const double expected = s.rows * s.cols;
  const double max_index = 0.5 * (s.rows + s.cols) * s.total;
  if (max_index == expected) return 1.0;
  return (s.index * s.total - expected) / (max_index - expected);
}

std::vector<int> max_weight_assignment(const Eigen::MatrixXd& score) {
  const int rows = static_cast<int>(score.rows());
  const int size = static_cast<int>(std::max(score.rows(), score.cols()));
  if (rows == 0) return {};
  // Hungarian algorithm (potentials form) minimising -score on a padded square.
  const double inf = std::numeric_limits<double>::infinity();
  auto cost = [&](int i, int j) {
    return (i < score.rows() && j < score.cols()) ? -score(i, j) : 0.0;
  };
  std::vector<double> u(static_cast<std::size_t>(size + 1), 0.0), v(static_cast<std::size_t>(size + 1), 0.0);
  std::vector<int> p(static_cast<std::size_t>(size + 1), 0), way(static_cast<std::size_t>(size + 1), 0);
  for (int i = 1; i <= size; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(size + 1), inf);
    std::vector<char> used(static_cast<std::size_t>(size + 1), 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = p[static_cast<std::size_t>(j0)];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= size; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= size; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> match(static_cast<std::size_t>(rows), -1);
  for (int j = 1; j <= size; ++j) {
    const int i = p[static_cast<std::size_t>(j)] - 1;
    if (i < rows && j - 1 < score.cols()) match[static_cast<std::size_t>(i)] = j - 1;
  }
  return match;
}

double accuracy(const Partition& p1, const Partition& truth) {
  check_sizes(p1, truth, 1);
  const ContingencyTable t(p1, truth);
  const auto match = max_weight_assignment(t.counts);
  double correct = 0.0;
  for (std::size_t i = 0; i < match.size(); ++i) {
    if (match[i] >= 0) correct += t.counts(static_cast<Index>(i), match[i]);
  }
  return correct / static_cast<double>(t.n);
}

}  // namespace rpcc
