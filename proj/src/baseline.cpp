#include "rpcc/baseline.hpp"

#include <algorithm>
#include <limits>
#include <random>

#include "rpcc/error.hpp"
#include "rpcc/kernels.hpp"

namespace rpcc {

void KMeansConfig::validate() const {
  std::string bad;
  if (K < 1) bad += " K must be >= 1;";
  if (max_iter < 1) bad += " max_iter must be >= 1;";
  if (replicates < 1) bad += " replicates must be >= 1;";
  if (!bad.empty()) throw ValidationError("invalid k-means config:" + bad);
}

Seed replicate_seed(Seed seed, int replicate) {
  // splitmix64
  Seed z = seed + 0x9e3779b97f4a7c15ULL * (static_cast<Seed>(replicate) + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

struct Replicate {
  std::vector<int> labels;
  Matrix centroids;
  double inertia = std::numeric_limits<double>::infinity();
  std::vector<double> history;
};

Matrix plus_plus_seeds(const Matrix& X, int K, std::mt19937_64& rng) {
  const Index n = X.rows();
  Matrix C(K, X.cols());
  std::uniform_int_distribution<Index> first(0, n - 1);
  C.row(0) = X.row(first(rng));
  std::vector<double> d2(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) d2[static_cast<std::size_t>(i)] = kernels::sq_dist(X, i, C, 0);
  for (int k = 1; k < K; ++k) {
    double total = 0.0;
    for (double v : d2) total += v;
    Index pick = 0;
    if (total > 0.0) {
      std::discrete_distribution<Index> dist(d2.begin(), d2.end());
      pick = dist(rng);
    } else {
      pick = first(rng);
    }
    C.row(k) = X.row(pick);
    for (Index i = 0; i < n; ++i) {
      d2[static_cast<std::size_t>(i)] = std::min(d2[static_cast<std::size_t>(i)], kernels::sq_dist(X, i, C, k));
    }
  }
  return C;
}

// Moves the farthest point of a cluster with two or more members into each
// empty cluster.
void repair_empty(std::vector<int>& labels, std::vector<double>& min_sq, int K) {
  std::vector<Index> count(static_cast<std::size_t>(K), 0);
  for (int l : labels) ++count[static_cast<std::size_t>(l)];
  for (int k = 0; k < K; ++k) {
    if (count[static_cast<std::size_t>(k)] > 0) continue;
    Index far = -1;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (count[static_cast<std::size_t>(labels[i])] < 2) continue;
      if (far < 0 || min_sq[i] > min_sq[static_cast<std::size_t>(far)]) far = static_cast<Index>(i);
    }
    --count[static_cast<std::size_t>(labels[static_cast<std::size_t>(far)])];
    labels[static_cast<std::size_t>(far)] = k;
    min_sq[static_cast<std::size_t>(far)] = 0.0;
    ++count[static_cast<std::size_t>(k)];
  }
}

double update_centroids(const Matrix& X, const std::vector<int>& labels, Matrix& C) {
  C.setZero();
  std::vector<double> count(static_cast<std::size_t>(C.rows()), 0.0);
  for (Index i = 0; i < X.rows(); ++i) {
    C.row(labels[static_cast<std::size_t>(i)]) += X.row(i);
    count[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])] += 1.0;
  }
  for (Index k = 0; k < C.rows(); ++k) C.row(k) /= count[static_cast<std::size_t>(k)];
  double inertia = 0.0;
  for (Index i = 0; i < X.rows(); ++i) inertia += kernels::sq_dist(X, i, C, labels[static_cast<std::size_t>(i)]);
  return inertia;
}

Replicate run_replicate(const Matrix& X, const KMeansConfig& cfg, Seed seed) {
  std::mt19937_64 rng(seed);
  Replicate rep;
  rep.centroids = plus_plus_seeds(X, cfg.K, rng);
  std::vector<int> labels;
  std::vector<double> min_sq;
  for (int it = 0; it < cfg.max_iter; ++it) {
    kernels::serial::assign_nearest(X, rep.centroids, labels, min_sq);
    repair_empty(labels, min_sq, cfg.K);
    const bool unchanged = labels == rep.labels;
    rep.labels = labels;
    rep.inertia = update_centroids(X, rep.labels, rep.centroids);
    rep.history.push_back(rep.inertia);
    if (unchanged) break;
  }
  return rep;
}

}  // namespace

KMeansResult kmeans(const DataMatrix& data, const KMeansConfig& cfg) {
  cfg.validate();
  if (cfg.K > data.n()) throw ParameterError("K exceeds the number of points");
  const Matrix& X = data.values();
  std::vector<Replicate> reps(static_cast<std::size_t>(cfg.replicates));
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < cfg.replicates; ++r) {
    reps[static_cast<std::size_t>(r)] = run_replicate(X, cfg, replicate_seed(cfg.seed, r));
  }

  KMeansResult out;
  for (int r = 0; r < cfg.replicates; ++r) {
    auto& rep = reps[static_cast<std::size_t>(r)];
    out.replicate_inertia.push_back(rep.inertia);
    if (rep.inertia < reps[static_cast<std::size_t>(out.best_replicate)].inertia) out.best_replicate = r;
  }
  auto& best = reps[static_cast<std::size_t>(out.best_replicate)];
  out.inertia = best.inertia;
  out.centroids = best.centroids;
  std::vector<int> labels = best.labels;
  for (auto& l : labels) ++l;
  out.partition = Partition(std::move(labels));
  for (auto& rep : reps) out.histories.push_back(std::move(rep.history));
  return out;
}

KMeansResult rp_kmeans(const DataMatrix& data, const ProjectionMatrix& pi, const KMeansConfig& cfg) {
  if (pi.d != data.d()) throw ParameterError("projection width differs from data dimension");
  return kmeans(pi.apply(data), cfg);
}

}  // namespace rpcc
