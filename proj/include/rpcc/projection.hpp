#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rpcc/dataset.hpp"
#include "rpcc/kernels.hpp"

namespace rpcc {

enum class ProjectionFamily { Gaussian, Rademacher };

ProjectionFamily parse_family(std::string_view name);
std::string_view family_name(ProjectionFamily family);

/// Pi = G / sqrt(m) with i.i.d. entries of G drawn from `family`.
struct ProjectionMatrix {
  Index m = 0;
  Index d = 0;
  Matrix values;  // m x d
  ProjectionFamily family = ProjectionFamily::Gaussian;
  Seed seed = 0;

  /// Embedded data (Pi A^T)^T, n x m.
  DataMatrix apply(const DataMatrix& data) const;

  /// JSON sidecar {m, d, family, seed}.
  std::string sidecar_json() const;
};

ProjectionMatrix sample_projection(Index m, Index d, ProjectionFamily family, Seed seed);
ProjectionMatrix sample_projection(Index m, Index d, std::string_view family, Seed seed);
/// Wraps an explicit matrix (for injected test maps).
ProjectionMatrix make_projection(Matrix values, ProjectionFamily family = ProjectionFamily::Gaussian,
                                 Seed seed = 0);

/// ceil(C eps^-2 ln n)
Index embedding_dim_logn(double epsilon, Index n, double C);
/// ceil(C eps^-2 ln K)
Index embedding_dim_logk(double epsilon, Index K, double C);

/// Sub-gaussian constants for the extreme singular value bounds.
struct SubgaussianProfile {
  double c_kappa_sq = 1.0;
  double t = 2.0;
  void validate() const;
};

struct IsometryReport {
  double epsilon = 0.0;
  Index total = 0;
  Index preserved = 0;
  double fraction = 1.0;
  bool all_preserved = true;
  std::vector<std::pair<Index, double>> violations;  // (vector index, ||Pi x||^2 / ||x||^2)
};

/// Within-cluster differences X_V (stored as index pairs per cluster) and all
/// centroid differences X_C over 0 <= alpha < beta <= K, where index 0 is the
/// grand mean.
struct DifferenceSets {
  std::vector<PairList> within;  // within[alpha-1] = pairs (i, j), i < j, of I_alpha
  Matrix centroids;              // (K + 1) x d, row 0 = a^(0)
  PairList centroid_pairs;       // (alpha, beta) with alpha < beta, rows of `centroids`
  Index N1 = 0;
  Index N2 = 0;

  /// X_V flattened in cluster order.
  PairList within_pairs() const;
  /// Explicit difference vectors of X_C, one per row.
  Matrix centroid_differences() const;
};

DifferenceSets build_difference_sets(const DataMatrix& data, const Partition& truth);

/// Checks (1-eps)||x||^2 <= ||Pi x||^2 <= (1+eps)||x||^2 for each row of
/// `vectors`. Zero vectors count as preserved.
IsometryReport verify_isometry(const ProjectionMatrix& pi, const Matrix& vectors, double epsilon,
                               bool record_violations = false);

/// Isometry over the pair differences {a_i - a_j} of a fixed point set.
/// Reference squared distances are computed once; each check projects the
/// points and compares pairwise.
class PairwiseIsometryChecker {
 public:
  PairwiseIsometryChecker(const Matrix& points, PairList pairs);

  IsometryReport check(const ProjectionMatrix& pi, double epsilon,
                       bool record_violations = false) const;
  IsometryReport check_embedded(const Matrix& projected, double epsilon,
                                bool record_violations = false) const;
  const PairList& pairs() const { return pairs_; }

 private:
  Matrix points_;
  PairList pairs_;
  std::vector<double> ref_sq_;
};

/// All C(n, 2) pairs i < j.
PairList all_pairs(Index n);

/// 1 - (sum of set sizes) * delta, for delta in (0, 1 / sum).
double union_bound_probability(const std::vector<Index>& set_sizes, double delta);

struct ConditionalRecoveryBound {
  double by_set_sizes = 0.0;             // 1 - N2 / ((N1 + N2)^p - N1)
  std::optional<double> by_point_count;  // 1 - 1 / (n^p - n + 1)
};

ConditionalRecoveryBound conditional_recovery_probability(Index N1, Index N2, double p,
                                                          std::optional<Index> n = std::nullopt);

struct SingularBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// upper = (sqrt(d) + C t) / sqrt(m) + C, lower = (sqrt(d) - C t) / sqrt(m) - C,
/// with C = c_kappa_sq.
SingularBounds singular_bounds(Index m, Index d, const SubgaussianProfile& profile);

struct ExtremeSingularValues {
  double largest = 0.0;
  double smallest = 0.0;
};

/// Exact SVD for m <= 512, otherwise power / inverse iteration on Pi Pi^T.
ExtremeSingularValues extreme_singular_values(const Matrix& pi);

/// lower <= s_min(Pi) <= s_max(Pi) <= upper
bool check_singular_bounds(const ProjectionMatrix& pi, const SubgaussianProfile& profile);

}  // namespace rpcc
