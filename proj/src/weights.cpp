#include "rpcc/weights.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "rpcc/error.hpp"

namespace rpcc {

WeightGraph::WeightGraph(Index n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
  if (n < 1) throw ParameterError("graph needs n >= 1");
  for (auto& e : edges_) {
    if (e.i == e.j) throw ParameterError("self loop in weight graph");
    if (e.i > e.j) std::swap(e.i, e.j);
    if (e.i < 0 || e.j >= n) throw ParameterError("edge endpoint out of range");
    if (!(e.w >= 0.0) || !std::isfinite(e.w)) throw ParameterError("edge weights must be finite and >= 0");
  }
  std::sort(edges_.begin(), edges_.end(),
            [](const Edge& a, const Edge& b) { return a.i != b.i ? a.i < b.i : a.j < b.j; });
  for (std::size_t e = 1; e < edges_.size(); ++e) {
    if (edges_[e].i == edges_[e - 1].i && edges_[e].j == edges_[e - 1].j) {
      throw ParameterError("duplicate edge in weight graph");
    }
  }
  incidence_ = Incidence::build(n_, edges_);
}

Index WeightGraph::find_edge(Index i, Index j) const {
  if (i < 0 || j < 0 || i >= n_ || j >= n_) throw ParameterError("node index out of range");
  if (i == j) return -1;
  // Scan the shorter incidence list.
  const auto deg = [&](Index v) {
    return incidence_.offsets[static_cast<std::size_t>(v) + 1] - incidence_.offsets[static_cast<std::size_t>(v)];
  };
  const Index from = deg(i) <= deg(j) ? i : j;
  const Index to = from == i ? j : i;
  for (Index p = incidence_.offsets[static_cast<std::size_t>(from)];
       p < incidence_.offsets[static_cast<std::size_t>(from) + 1]; ++p) {
    const Index e = incidence_.entries[static_cast<std::size_t>(p)].edge;
    const auto& ed = edges_[static_cast<std::size_t>(e)];
    if (ed.i == to || ed.j == to) return e;
  }
  return -1;
}

double WeightGraph::weight(Index i, Index j) const {
  const Index e = find_edge(i, j);
  return e < 0 ? 0.0 : edges_[static_cast<std::size_t>(e)].w;
}

bool WeightGraph::has_edge(Index i, Index j) const { return find_edge(i, j) >= 0; }

void WeightGraph::weight_row(Index i, std::vector<double>& row) const {
  row.assign(static_cast<std::size_t>(n_), 0.0);
  for (Index p = incidence_.offsets[static_cast<std::size_t>(i)];
       p < incidence_.offsets[static_cast<std::size_t>(i) + 1]; ++p) {
    const auto& ed = edges_[static_cast<std::size_t>(incidence_.entries[static_cast<std::size_t>(p)].edge)];
    row[static_cast<std::size_t>(ed.i == i ? ed.j : ed.i)] = ed.w;
  }
}

std::string WeightGraph::to_csv() const {
  std::string out;
  char buf[96];
  for (const auto& e : edges_) {
    std::snprintf(buf, sizeof buf, "%lld,%lld,%.17g\n", static_cast<long long>(e.i + 1),
                  static_cast<long long>(e.j + 1), e.w);
    out += buf;
  }
  return out;
}

WeightGraph WeightGraph::from_csv(const std::string& text, Index n) {
  std::vector<Edge> edges;
  if (text.find_first_not_of(" \t\r\n") != std::string::npos) {
    const auto parsed = parse_csv(text);
    const auto& m = parsed.data.values();
    if (m.cols() != 3) throw ParseError("weight triplets need 3 columns", 1);
    for (Index r = 0; r < m.rows(); ++r) {
      if (m(r, 0) != std::floor(m(r, 0)) || m(r, 1) != std::floor(m(r, 1))) {
        throw ParseError("edge endpoints must be integers", static_cast<std::size_t>(r) + 1);
      }
      edges.push_back({static_cast<Index>(m(r, 0)) - 1, static_cast<Index>(m(r, 1)) - 1, m(r, 2)});
    }
  }
  return WeightGraph(n, std::move(edges));
}

namespace {

std::set<std::pair<Index, Index>> knn_pairs(const DataMatrix& data, Index k) {
  const auto nbrs = kernels::omp::knn(data.values(), k);
  std::set<std::pair<Index, Index>> pairs;
  for (Index i = 0; i < data.n(); ++i) {
    for (Index j : nbrs[static_cast<std::size_t>(i)]) pairs.emplace(std::min(i, j), std::max(i, j));
  }
  return pairs;
}

WeightGraph gaussian_graph(const DataMatrix& data, const std::set<std::pair<Index, Index>>& pairs,
                           double phi) {
  std::vector<Edge> edges;
  edges.reserve(pairs.size());
  const Matrix& A = data.values();
  for (const auto& [i, j] : pairs) {
    edges.push_back({i, j, std::exp(-phi * kernels::sq_dist(A, i, A, j))});
  }
  return WeightGraph(data.n(), std::move(edges));
}

void check_phi(double phi) {
  if (!(phi > 0.0) || !std::isfinite(phi)) throw ParameterError("kernel scale phi must be > 0");
}

}  // namespace

WeightGraph knn_gaussian_weights(const DataMatrix& data, Index k, double phi) {
  check_phi(phi);
  if (k < 1 || k >= data.n()) throw ParameterError("knn weights need 1 <= k < n");
  return gaussian_graph(data, knn_pairs(data, k), phi);
}

WeightGraph knn_gaussian_weights(const DataMatrix& data, Index k) {
  return knn_gaussian_weights(data, k, 1.0 / static_cast<double>(data.d()));
}

WeightGraph uniform_weights(Index n) {
  if (n < 2) throw ParameterError("uniform weights need n >= 2");
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) edges.push_back({i, j, 1.0});
  }
  return WeightGraph(n, std::move(edges));
}

WeightGraph oracle_experiment_graph(const DataMatrix& data, const Partition& truth, Index k,
                                    double phi) {
  check_phi(phi);
  if (truth.n() != data.n()) throw ParameterError("partition size does not match data");
  if (k < 1 || k >= data.n()) throw ParameterError("knn weights need 1 <= k < n");
  auto pairs = knn_pairs(data, k);
  for (const auto& members : truth.members()) {
    for (std::size_t a = 0; a < members.size(); ++a) {
      for (std::size_t b = a + 1; b < members.size(); ++b) pairs.emplace(members[a], members[b]);
    }
  }
  return gaussian_graph(data, pairs, phi);
}

ClusterWeightSums::ClusterWeightSums(const WeightGraph& graph, const Partition& truth)
    : sizes_(truth.sizes()) {
  if (graph.n() != truth.n()) throw ParameterError("partition size does not match graph");
  const int K = truth.K();
  per_node_ = Eigen::MatrixXd::Zero(graph.n(), K);
  between_ = Eigen::MatrixXd::Zero(K, K);
  for (const auto& e : graph.edges()) {
    const int li = truth.label(e.i) - 1;
    const int lj = truth.label(e.j) - 1;
    per_node_(e.i, lj) += e.w;
    per_node_(e.j, li) += e.w;
    between_(li, lj) += e.w;
    if (li != lj) between_(lj, li) += e.w;
  }
  // Within-cluster blocks count ordered pairs, matching the double sum.
  for (int a = 0; a < K; ++a) between_(a, a) *= 2.0;
}

double ClusterWeightSums::mu(Index i, Index j, int alpha) const {
  double total = 0.0;
  for (Index b = 0; b < per_node_.cols(); ++b) {
    if (b == alpha - 1) continue;
    total += std::abs(per_node_(i, b) - per_node_(j, b));
  }
  return total;
}

double ClusterWeightSums::mean_external(int beta) const {
  double total = 0.0;
  for (Index l = 0; l < between_.cols(); ++l) {
    if (l != beta - 1) total += between_(beta - 1, l);
  }
  return total / static_cast<double>(sizes_[static_cast<std::size_t>(beta - 1)]);
}

AssumptionReport check_assumption2(const WeightGraph& graph, const Partition& truth) {
  const ClusterWeightSums sums(graph, truth);
  AssumptionReport report;
  const auto members = truth.members();
  std::vector<double> row;
  for (std::size_t a = 0; a < members.size(); ++a) {
    const int alpha = static_cast<int>(a) + 1;
    const auto n_alpha = static_cast<double>(members[a].size());
    for (std::size_t p = 0; p < members[a].size(); ++p) {
      const Index i = members[a][p];
      graph.weight_row(i, row);
      for (std::size_t q = p + 1; q < members[a].size(); ++q) {
        const Index j = members[a][q];
        const double w = row[static_cast<std::size_t>(j)];
        if (!(w > 0.0)) report.all_positive = false;
        const double margin = n_alpha * w - sums.mu(i, j, alpha);
        if (margin < report.margin) {
          report.margin = margin;
          report.worst_cluster = alpha;
          report.worst_i = i;
          report.worst_j = j;
        }
      }
    }
  }
  report.holds = report.all_positive && report.margin > 0.0;
  return report;
}

}  // namespace rpcc
