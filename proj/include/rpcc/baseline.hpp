#pragma once

#include <vector>

#include "rpcc/dataset.hpp"
#include "rpcc/projection.hpp"

namespace rpcc {

struct KMeansConfig {
  int K = 1;
  int max_iter = 10000;
  int replicates = 30;
  Seed seed = 0;

  void validate() const;
};

struct KMeansResult {
  Partition partition;
  double inertia = 0.0;
  Matrix centroids;  // K x dim, row alpha-1 is cluster alpha
  int best_replicate = 0;
  std::vector<double> replicate_inertia;
  /// Inertia after every Lloyd step, per replicate.
  std::vector<std::vector<double>> histories;
};

/// Seed of replicate r, independent of the replicate count.
Seed replicate_seed(Seed seed, int replicate);

/// Lloyd's iterations from k-means++ seeds, best of `replicates` (ties to the
/// lowest replicate). Clusters that go empty take the point farthest from
/// its centroid.
KMeansResult kmeans(const DataMatrix& data, const KMeansConfig& cfg);

/// kmeans on the embedded rows (Pi A^T)^T.
KMeansResult rp_kmeans(const DataMatrix& data, const ProjectionMatrix& pi, const KMeansConfig& cfg);

}  // namespace rpcc
