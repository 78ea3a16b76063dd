#include <benchmark/benchmark.h>

#include <random>

#include "rpcc/kernels.hpp"
#include "rpcc/projection.hpp"
#include "rpcc/weights.hpp"

using namespace rpcc;

namespace {

Matrix random_matrix(Index rows, Index cols, Seed seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Matrix M(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) M(i, j) = g(rng);
  return M;
}

struct Fixture {
  explicit Fixture(Index n, Index d = 200) : X(random_matrix(n, d, 1)) {
    graph = knn_gaussian_weights(DataMatrix(X), 10);
    kernels::omp::edge_differences(X, graph.edges(), V);
    thresholds.assign(static_cast<std::size_t>(graph.num_edges()), 1.0);
    pairs = all_pairs(n);
    P = random_matrix(n, 50, 2);
    for (const auto& [i, j] : pairs) ref.push_back(kernels::sq_dist(P, i, P, j));
    centroids = random_matrix(20, d, 3);
  }
  Matrix X, V, P, centroids;
  WeightGraph graph;
  std::vector<double> thresholds, ref;
  PairList pairs;
};

const Fixture& fixture(Index n) {
  static Fixture small(500), large(2000);
  return n <= 500 ? small : large;
}

template <bool Parallel>
void knn(benchmark::State& state) {
  const auto& f = fixture(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(Parallel ? kernels::omp::knn(f.X, 10) : kernels::serial::knn(f.X, 10));
  }
}

template <bool Parallel>
void edge_differences(benchmark::State& state) {
  const auto& f = fixture(state.range(0));
  Matrix out;
  for (auto _ : state) {
    if (Parallel) {
      kernels::omp::edge_differences(f.X, f.graph.edges(), out);
    } else {
      kernels::serial::edge_differences(f.X, f.graph.edges(), out);
    }
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void incidence_transpose(benchmark::State& state) {
  const auto& f = fixture(state.range(0));
  Matrix out;
  for (auto _ : state) {
    if (Parallel) {
      kernels::omp::incidence_transpose(f.V, f.graph.incidence(), out);
    } else {
      kernels::serial::incidence_transpose(f.V, f.graph.edges(), f.graph.n(), out);
    }
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void block_soft_threshold(benchmark::State& state) {
  const auto& f = fixture(state.range(0));
  Matrix Z;
  for (auto _ : state) {
    benchmark::DoNotOptimize(Parallel ? kernels::omp::block_soft_threshold(f.V, f.thresholds, Z)
                                      : kernels::serial::block_soft_threshold(f.V, f.thresholds, Z));
  }
}

template <bool Parallel>
void count_preserved(benchmark::State& state) {
  const auto& f = fixture(state.range(0));
  for (auto _ : state) {
    const auto c = Parallel ? kernels::omp::count_preserved(f.P, f.pairs, f.ref, 0.3)
                            : kernels::serial::count_preserved(f.P, f.pairs, f.ref, 0.3);
    benchmark::DoNotOptimize(c.preserved);
  }
}

template <bool Parallel>
void assign_nearest(benchmark::State& state) {
  const auto& f = fixture(state.range(0));
  std::vector<int> labels;
  std::vector<double> min_sq;
  for (auto _ : state) {
    benchmark::DoNotOptimize(Parallel ? kernels::omp::assign_nearest(f.X, f.centroids, labels, min_sq)
                                      : kernels::serial::assign_nearest(f.X, f.centroids, labels, min_sq));
  }
}

}  // namespace

#define RPCC_BENCH_PAIR(fn)                                                                   \
  BENCHMARK(fn<false>)->Name(#fn "/serial")->Arg(500)->Arg(2000)->Unit(benchmark::kMicrosecond); \
  BENCHMARK(fn<true>)->Name(#fn "/omp")->Arg(500)->Arg(2000)->Unit(benchmark::kMicrosecond)

RPCC_BENCH_PAIR(knn);
RPCC_BENCH_PAIR(edge_differences);
RPCC_BENCH_PAIR(incidence_transpose);
RPCC_BENCH_PAIR(block_soft_threshold);
RPCC_BENCH_PAIR(count_preserved);
RPCC_BENCH_PAIR(assign_nearest);

BENCHMARK_MAIN();
