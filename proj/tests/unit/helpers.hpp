#pragma once

#include <array>
#include <random>
#include <vector>

#include "rpcc/dataset.hpp"
#include "rpcc/weights.hpp"

namespace testing {

inline rpcc::DataMatrix rows(std::initializer_list<std::initializer_list<double>> r) {
  rpcc::Matrix m(static_cast<rpcc::Index>(r.size()), static_cast<rpcc::Index>(r.begin()->size()));
  rpcc::Index i = 0;
  for (const auto& row : r) {
    rpcc::Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return rpcc::DataMatrix(m);
}

inline rpcc::Partition labels(std::initializer_list<int> l) { return rpcc::Partition(std::vector<int>(l)); }

inline rpcc::DataMatrix random_data(rpcc::Index n, rpcc::Index d, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  rpcc::Matrix m(n, d);
  for (rpcc::Index i = 0; i < n; ++i)
    for (rpcc::Index j = 0; j < d; ++j) m(i, j) = g(rng);
  return rpcc::DataMatrix(m);
}

// Random graph with each pair present with probability p and weights in (0.1, 2).
inline rpcc::WeightGraph random_graph(rpcc::Index n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution keep(p);
  std::uniform_real_distribution<double> w(0.1, 2.0);
  std::vector<rpcc::Edge> edges;
  for (rpcc::Index i = 0; i < n; ++i)
    for (rpcc::Index j = i + 1; j < n; ++j)
      if (keep(rng)) edges.push_back({i, j, w(rng)});
  return rpcc::WeightGraph(n, edges);
}

inline std::vector<std::array<double, 3>> edge_triples(const rpcc::WeightGraph& g) {
  std::vector<std::array<double, 3>> out;
  for (const auto& e : g.edges()) out.push_back({static_cast<double>(e.i), static_cast<double>(e.j), e.w});
  return out;
}

inline std::vector<int> zero_based(const rpcc::Partition& p) {
  std::vector<int> out;
  for (int l : p.labels()) out.push_back(l - 1);
  return out;
}

}  // namespace testing
