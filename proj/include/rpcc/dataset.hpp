#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rpcc/types.hpp"

namespace rpcc {

/// n points in R^d; row i is a_i. Entries are finite, n >= 1, d >= 1.
class DataMatrix {
 public:
  DataMatrix() = default;
  explicit DataMatrix(Matrix values);

  Index n() const noexcept { return values_.rows(); }
  Index d() const noexcept { return values_.cols(); }
  const Matrix& values() const noexcept { return values_; }
  auto row(Index i) const { return values_.row(i); }

  /// Grand mean a^(0).
  Vector mean() const;

 private:
  Matrix values_;
};

/// Cluster assignment of n points. Labels are 1..K and every cluster is
/// non-empty.
class Partition {
 public:
  Partition() = default;
  /// Labels must already be 1..K with every value present.
  explicit Partition(std::vector<int> labels);

  /// Re-indexes arbitrary integer labels to 1..K in order of first appearance.
  static Partition from_raw(std::span<const long> raw);
  static Partition singletons(Index n);
  static Partition single_cluster(Index n);

  Index n() const noexcept { return static_cast<Index>(labels_.size()); }
  int K() const noexcept { return K_; }
  int label(Index i) const { return labels_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& labels() const noexcept { return labels_; }

  /// n_alpha for alpha = 1..K, stored at index alpha-1.
  std::vector<Index> sizes() const;
  /// I_alpha for alpha = 1..K, stored at index alpha-1, ascending.
  std::vector<std::vector<Index>> members() const;

  /// Same labelling up to a permutation of cluster ids.
  bool same_clusters(const Partition& other) const;
  /// Relabelled so that clusters are numbered by first appearance.
  Partition canonical() const;

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::vector<int> labels_;
  int K_ = 0;
};

/// Spherical Gaussian mixture sum_k w_k N(mu_k, sigma_k^2 I_d).
struct MixtureSpec {
  Index d = 0;
  int K = 0;
  std::vector<Vector> means;
  std::vector<double> variances;
  std::vector<double> mix_weights;
  Index n = 0;
  Seed seed = 0;
  /// Exact per-cluster counts n * w_k (largest remainder when not integral)
  /// with points ordered by cluster. Otherwise labels are sampled i.i.d.
  bool balanced = true;

  /// Throws ValidationError naming every violated field.
  void validate() const;

  /// K clusters centred at e_1..e_K (requires K <= d), equal weights,
  /// common variance.
  static MixtureSpec basis_means(Index d, int K, double variance, Index n, Seed seed);
};

std::pair<DataMatrix, Partition> generate_mixture(const MixtureSpec& spec);

/// K = 20 spherical Gaussians N(e_k, 0.005 I_d): `large_size` samples for
/// clusters 1-3 and `small_size` for clusters 4-20. For d < 20 the means of
/// clusters past d are e_(k mod d) scaled by 1 + floor((k-1) / d).
std::pair<DataMatrix, Partition> unbalanced_fixture(Index d = 2000, Index large_size = 2000,
                                                    Index small_size = 100, Seed seed = 7700);

struct CsvOptions {
  bool has_labels = false;
  bool skip_header = false;
};

struct LabelledData {
  DataMatrix data;
  std::optional<Partition> labels;
};

/// One row per line, comma separated. When `has_labels` the last column is an
/// integer label re-indexed to 1..K by first appearance.
LabelledData parse_csv(const std::string& text, CsvOptions opts = {});
LabelledData load_csv(const std::filesystem::path& path, CsvOptions opts = {});

/// `%.17g` values; the label column is appended last when given.
std::string format_csv(const Matrix& values, const Partition* labels = nullptr);
void save_csv(const std::filesystem::path& path, const Matrix& values,
              const Partition* labels = nullptr);

}  // namespace rpcc
