#include "rpcc/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "rpcc/error.hpp"

namespace rpcc {

void SolverSettings::validate() const {
  if (!(tol > 0.0)) throw ParameterError("solver tolerance must be > 0");
  if (max_iter < 1) throw ParameterError("max_iter must be >= 1");
  if (!(rho > 0.0)) throw ParameterError("rho must be > 0");
  if (check_every < 1) throw ParameterError("check_every must be >= 1");
  if (tau_merge && !(*tau_merge >= 0.0)) throw ParameterError("tau_merge must be >= 0");
  if (!(residual_tol >= 0.0)) throw ParameterError("residual_tol must be >= 0");
}

double objective_value(const ProblemInstance& inst, const Matrix& X) {
  const Matrix& A = inst.data.values();
  if (X.rows() != A.rows() || X.cols() != A.cols()) throw ParameterError("centroid matrix shape mismatch");
  double penalty = 0.0;
  for (const auto& e : inst.graph.edges()) penalty += e.w * (X.row(e.i) - X.row(e.j)).norm();
  return 0.5 * (X - A).squaredNorm() + inst.gamma * penalty;
}

double dual_value(const ProblemInstance& inst, const Matrix& Z) {
  Matrix BtZ;
  kernels::omp::incidence_transpose(Z, inst.graph.incidence(), BtZ);
  return (inst.data.values().array() * BtZ.array()).sum() - 0.5 * BtZ.squaredNorm();
}

double relative_gap(double primal, double dual) {
  return std::abs(primal - dual) / (1.0 + std::abs(primal) + std::abs(dual));
}

double default_tau_merge(const DataMatrix& data, const WeightGraph& graph) {
  std::vector<double> lengths;
  lengths.reserve(graph.edges().size());
  for (const auto& e : graph.edges()) lengths.push_back(std::sqrt(kernels::sq_dist(data.values(), e.i, data.values(), e.j)));
  if (lengths.empty()) return 1e-12;
  const auto mid = lengths.begin() + static_cast<std::ptrdiff_t>(lengths.size() / 2);
  std::nth_element(lengths.begin(), mid, lengths.end());
  double median = *mid;
  if (lengths.size() % 2 == 0) {
    median = 0.5 * (median + *std::max_element(lengths.begin(), mid));
  }
  return std::max(1e-5 * median, 1e-12);
}

ConvexClusteringSolver::ConvexClusteringSolver(const DataMatrix& data, const WeightGraph& graph,
                                               SolverSettings settings)
    : data_(data), graph_(graph), settings_(settings) {
  settings_.validate();
  if (graph.n() != data.n()) throw ParameterError("graph and data disagree on n");
  tau_merge_ = settings_.tau_merge ? *settings_.tau_merge : default_tau_merge(data, graph);

  const Index n = data.n();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(n) + 4 * graph.edges().size());
  for (Index i = 0; i < n; ++i) trip.emplace_back(i, i, 1.0);
  const double rho = settings_.rho;
  for (const auto& e : graph.edges()) {
    trip.emplace_back(e.i, e.i, rho);
    trip.emplace_back(e.j, e.j, rho);
    trip.emplace_back(e.i, e.j, -rho);
    trip.emplace_back(e.j, e.i, -rho);
  }
  Eigen::SparseMatrix<double> M(n, n);
  M.setFromTriplets(trip.begin(), trip.end());
  factor_.compute(M);
  if (factor_.info() != Eigen::Success) throw Error("factorisation of I + rho B^T B failed");

  kernels::omp::edge_differences(data.values(), graph.edges(), BA_);
  reset();
}

void ConvexClusteringSolver::reset() {
  X_ = data_.values();
  Z_.setZero(graph_.num_edges(), data_.d());
  U_.setZero(graph_.num_edges(), data_.d());
  warm_ = false;
}

void ConvexClusteringSolver::x_update() {
  // (I + rho B^T B) X = A + rho B^T (Z - U)
  work_edges_ = Z_ - U_;
  kernels::omp::incidence_transpose(work_edges_, graph_.incidence(), work_nodes_);
  rhs_ = data_.values() + settings_.rho * work_nodes_;
  X_ = factor_.solve(rhs_);
}

double ConvexClusteringSolver::gap_check(const ProblemInstance& inst, SolveResult& out) {
  // Dual candidate: rho U projected onto the balls ||z_e|| <= gamma w_e.
  Matrix& Y = work_edges_;
  Y = settings_.rho * U_;
  const auto& edges = graph_.edges();
  for (Index e = 0; e < Y.rows(); ++e) {
    const double radius = inst.gamma * edges[static_cast<std::size_t>(e)].w;
    const double norm = Y.row(e).norm();
    if (norm > radius) Y.row(e) *= (norm > 0.0 ? radius / norm : 0.0);
  }
  out.primal_obj = objective_value(inst, X_);
  out.dual_obj = dual_value(inst, Y);
  out.rel_gap = relative_gap(out.primal_obj, out.dual_obj);
  return out.rel_gap;
}

SolveResult ConvexClusteringSolver::solve(double gamma) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ParameterError("gamma must be finite and >= 0");
  const ProblemInstance inst{data_, graph_, gamma};
  SolveResult out;
  out.gamma = gamma;
  out.tau_merge = tau_merge_;

  if (gamma == 0.0 || graph_.num_edges() == 0) {
    out.X = data_.values();
    out.dual_edge_vars.setZero(graph_.num_edges(), data_.d());
    out.primal_obj = objective_value(inst, out.X);
    out.dual_obj = out.primal_obj;
    out.rel_gap = 0.0;
    out.iterations = 0;
    out.success = true;
    return out;
  }

  const auto& edges = graph_.edges();
  thresholds_.resize(edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e) thresholds_[e] = gamma * edges[e].w / settings_.rho;
  if (!warm_) {
    // Cold start: X = A, Z = prox(BA), U = 0.
    kernels::omp::block_soft_threshold(BA_, thresholds_, Z_);
  }
  warm_ = true;

  const bool residuals = settings_.residual_tol > 0.0;
  Matrix V, dZ;
  Matrix U_prev;
  int it = 0;
  bool converged = false;
  while (it < settings_.max_iter) {
    const bool check = (it + 1) % settings_.check_every == 0 || it + 1 == settings_.max_iter;
    if (check && residuals) {
      U_prev = U_;
      Z_prev_ = Z_;
    }
    x_update();
    kernels::omp::edge_differences(X_, edges, V);
    V += U_;
    kernels::omp::block_soft_threshold(V, thresholds_, Z_);
    U_ = V - Z_;
    ++it;
    if (!check || gap_check(inst, out) > settings_.tol) continue;
    if (residuals) {
      // r = B X - Z = U - U_prev, s = rho B^T (Z - Z_prev)
      dZ = Z_ - Z_prev_;
      Matrix s;
      kernels::omp::incidence_transpose(dZ, graph_.incidence(), s);
      if ((U_ - U_prev).norm() > settings_.residual_tol || settings_.rho * s.norm() > settings_.residual_tol) continue;
    }
    converged = true;
    break;
  }

  out.iterations = it;
  out.success = converged;
  out.X = X_;
  out.dual_edge_vars = work_edges_;  // projected dual from the last gap check
  for (Index e = 0; e < Z_.rows(); ++e) {
    if ((Z_.row(e).array() == 0.0).all()) {
      out.fused_edges.emplace_back(edges[static_cast<std::size_t>(e)].i, edges[static_cast<std::size_t>(e)].j);
    }
  }
  return out;
}

SolveResult solve(const ProblemInstance& inst, const SolverSettings& settings) {
  if (!(inst.gamma >= 0.0)) throw ParameterError("gamma must be >= 0");
  ConvexClusteringSolver solver(inst.data, inst.graph, settings);
  return solver.solve(inst.gamma);
}

namespace {

struct DisjointSets {
  explicit DisjointSets(Index n) : parent(static_cast<std::size_t>(n)) {
    std::iota(parent.begin(), parent.end(), Index{0});
  }
  Index find(Index v) {
    while (parent[static_cast<std::size_t>(v)] != v) {
      parent[static_cast<std::size_t>(v)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
      v = parent[static_cast<std::size_t>(v)];
    }
    return v;
  }
  void unite(Index a, Index b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
  }
  std::vector<Index> parent;
};

}  // namespace

Partition extract_partition(const SolveResult& result) {
  const Matrix& X = result.X;
  const Index n = X.rows();
  if (n < 1) throw ParameterError("empty solution");
  DisjointSets sets(n);
  for (const auto& [i, j] : result.fused_edges) sets.unite(i, j);

  // Any pair within tau also lies within tau along a unit direction, so a
  // sorted sweep over that projection only visits candidate pairs.
  const double tau = result.tau_merge;
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> g;
  Vector dir(X.cols());
  for (Index c = 0; c < X.cols(); ++c) dir(c) = g(rng);
  dir.normalize();
  const Vector key = X * dir;
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) { return key(a) < key(b); });
  const double tau_sq = tau * tau;
  for (std::size_t p = 0; p < order.size(); ++p) {
    for (std::size_t q = p + 1; q < order.size() && key(order[q]) - key(order[p]) <= tau; ++q) {
      if (kernels::sq_dist(X, order[p], X, order[q]) <= tau_sq) sets.unite(order[p], order[q]);
    }
  }

  std::vector<long> roots(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) roots[static_cast<std::size_t>(i)] = static_cast<long>(sets.find(i));
  return Partition::from_raw(roots);
}

}  // namespace rpcc
