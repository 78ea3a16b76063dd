#include "rpcc/projection.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <json.hpp>

#include "rpcc/error.hpp"

namespace rpcc {

ProjectionFamily parse_family(std::string_view name) {
  if (name == "normal" || name == "gaussian") return ProjectionFamily::Gaussian;
  if (name == "rademacher") return ProjectionFamily::Rademacher;
  throw ParameterError("unknown projection family '" + std::string(name) + "'");
}

std::string_view family_name(ProjectionFamily family) {
  return family == ProjectionFamily::Gaussian ? "normal" : "rademacher";
}

DataMatrix ProjectionMatrix::apply(const DataMatrix& data) const {
  if (data.d() != d) throw ParameterError("projection expects d = " + std::to_string(d));
  return DataMatrix(data.values() * values.transpose());
}

std::string ProjectionMatrix::sidecar_json() const {
  nlohmann::json j{{"m", m}, {"d", d}, {"family", family_name(family)}, {"seed", seed}};
  return j.dump(2);
}

ProjectionMatrix sample_projection(Index m, Index d, ProjectionFamily family, Seed seed) {
  if (m < 1 || d < 1) throw ParameterError("projection needs m >= 1 and d >= 1");
  ProjectionMatrix pi;
  pi.m = m;
  pi.d = d;
  pi.family = family;
  pi.seed = seed;
  pi.values.resize(m, d);
  std::mt19937_64 rng(seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  if (family == ProjectionFamily::Gaussian) {
    std::normal_distribution<double> g(0.0, 1.0);
    for (Index r = 0; r < m; ++r)
      for (Index c = 0; c < d; ++c) pi.values(r, c) = scale * g(rng);
  } else {
    std::bernoulli_distribution coin(0.5);
    for (Index r = 0; r < m; ++r)
      for (Index c = 0; c < d; ++c) pi.values(r, c) = coin(rng) ? scale : -scale;
  }
  return pi;
}

ProjectionMatrix sample_projection(Index m, Index d, std::string_view family, Seed seed) {
  return sample_projection(m, d, parse_family(family), seed);
}

ProjectionMatrix make_projection(Matrix values, ProjectionFamily family, Seed seed) {
  if (values.rows() < 1 || values.cols() < 1 || !values.allFinite()) {
    throw ParameterError("projection matrix must be non-empty and finite");
  }
  ProjectionMatrix pi;
  pi.m = values.rows();
  pi.d = values.cols();
  pi.values = std::move(values);
  pi.family = family;
  pi.seed = seed;
  return pi;
}

namespace {

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ParameterError("distortion epsilon must lie in (0, 1)");
}

Index ceil_dim(double epsilon, Index count, double C, const char* what) {
  check_epsilon(epsilon);
  if (count < 2) throw ParameterError(std::string(what) + " must be >= 2");
  if (!(C > 0.0)) throw ParameterError("constant C must be > 0");
  return static_cast<Index>(std::ceil(C * std::log(static_cast<double>(count)) / (epsilon * epsilon)));
}

}  // namespace

Index embedding_dim_logn(double epsilon, Index n, double C) { return ceil_dim(epsilon, n, C, "n"); }

Index embedding_dim_logk(double epsilon, Index K, double C) { return ceil_dim(epsilon, K, C, "K"); }

void SubgaussianProfile::validate() const {
  if (!(c_kappa_sq > 0.0)) throw ParameterError("C_kappa^2 must be > 0");
  if (!(t >= 0.0)) throw ParameterError("deviation t must be >= 0");
}

PairList DifferenceSets::within_pairs() const {
  PairList out;
  out.reserve(static_cast<std::size_t>(N1));
  for (const auto& w : within) out.insert(out.end(), w.begin(), w.end());
  return out;
}

Matrix DifferenceSets::centroid_differences() const {
  Matrix out(static_cast<Index>(centroid_pairs.size()), centroids.cols());
  for (std::size_t p = 0; p < centroid_pairs.size(); ++p) {
    out.row(static_cast<Index>(p)) =
        centroids.row(centroid_pairs[p].first) - centroids.row(centroid_pairs[p].second);
  }
  return out;
}

DifferenceSets build_difference_sets(const DataMatrix& data, const Partition& truth) {
  if (truth.n() != data.n()) throw ParameterError("partition size does not match data");
  DifferenceSets sets;
  const auto members = truth.members();
  sets.centroids = Matrix::Zero(truth.K() + 1, data.d());
  sets.centroids.row(0) = data.mean().transpose();
  for (std::size_t a = 0; a < members.size(); ++a) {
    PairList pairs;
    for (std::size_t p = 0; p < members[a].size(); ++p) {
      sets.centroids.row(static_cast<Index>(a) + 1) += data.row(members[a][p]);
      for (std::size_t q = p + 1; q < members[a].size(); ++q) pairs.emplace_back(members[a][p], members[a][q]);
    }
    sets.centroids.row(static_cast<Index>(a) + 1) /= static_cast<double>(members[a].size());
    sets.N1 += static_cast<Index>(pairs.size());
    sets.within.push_back(std::move(pairs));
  }
  for (Index a = 0; a <= truth.K(); ++a)
    for (Index b = a + 1; b <= truth.K(); ++b) sets.centroid_pairs.emplace_back(a, b);
  sets.N2 = static_cast<Index>(sets.centroid_pairs.size());
  return sets;
}

namespace {

IsometryReport finish_report(double epsilon, Index total, kernels::DistortionCount&& count) {
  IsometryReport r;
  r.epsilon = epsilon;
  r.total = total;
  r.preserved = count.preserved;
  r.fraction = total > 0 ? static_cast<double>(count.preserved) / static_cast<double>(total) : 1.0;
  r.all_preserved = count.preserved == total;
  r.violations = std::move(count.violations);
  return r;
}

}  // namespace

IsometryReport verify_isometry(const ProjectionMatrix& pi, const Matrix& vectors, double epsilon,
                               bool record_violations) {
  check_epsilon(epsilon);
  if (vectors.rows() > 0 && vectors.cols() != pi.d) {
    throw ParameterError("vector dimension does not match projection");
  }
  const Matrix projected = vectors * pi.values.transpose();
  kernels::DistortionCount count;
  for (Index v = 0; v < vectors.rows(); ++v) {
    const double ref = vectors.row(v).squaredNorm();
    const double img = projected.row(v).squaredNorm();
    if ((1.0 - epsilon) * ref <= img && img <= (1.0 + epsilon) * ref) {
      ++count.preserved;
    } else if (record_violations) {
      count.violations.emplace_back(v, img / ref);
    }
  }
  return finish_report(epsilon, vectors.rows(), std::move(count));
}

PairwiseIsometryChecker::PairwiseIsometryChecker(const Matrix& points, PairList pairs)
    : points_(points), pairs_(std::move(pairs)) {
  ref_sq_.resize(pairs_.size());
  for (std::size_t p = 0; p < pairs_.size(); ++p) {
    const auto [i, j] = pairs_[p];
    if (i < 0 || j < 0 || i >= points_.rows() || j >= points_.rows()) {
      throw ParameterError("pair index out of range");
    }
    ref_sq_[p] = kernels::sq_dist(points_, i, points_, j);
  }
}

IsometryReport PairwiseIsometryChecker::check(const ProjectionMatrix& pi, double epsilon,
                                              bool record_violations) const {
  if (pi.d != points_.cols()) throw ParameterError("vector dimension does not match projection");
  return check_embedded(points_ * pi.values.transpose(), epsilon, record_violations);
}

IsometryReport PairwiseIsometryChecker::check_embedded(const Matrix& projected, double epsilon,
                                                       bool record_violations) const {
  check_epsilon(epsilon);
  if (projected.rows() != points_.rows()) throw ParameterError("embedded point count mismatch");
  auto count = kernels::omp::count_preserved(projected, pairs_, ref_sq_, epsilon, record_violations);
  return finish_report(epsilon, static_cast<Index>(pairs_.size()), std::move(count));
}

PairList all_pairs(Index n) {
  PairList out;
  out.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) out.emplace_back(i, j);
  return out;
}

double union_bound_probability(const std::vector<Index>& set_sizes, double delta) {
  double total = 0.0;
  for (Index s : set_sizes) {
    if (s < 0) throw ParameterError("set sizes must be non-negative");
    total += static_cast<double>(s);
  }
  if (!(total > 0.0)) throw ParameterError("union bound needs a non-empty collection");
  if (!(delta > 0.0 && delta < 1.0 / total)) {
    throw ParameterError("delta must lie in (0, 1 / sum of set sizes)");
  }
  return 1.0 - total * delta;
}

ConditionalRecoveryBound conditional_recovery_probability(Index N1, Index N2, double p,
                                                          std::optional<Index> n) {
  if (!(p > 1.0)) throw ParameterError("exponent p must be > 1");
  if (N1 < 1 || N2 < 1) throw ParameterError("N1 and N2 must be >= 1");
  ConditionalRecoveryBound out;
  const double total = static_cast<double>(N1 + N2);
  out.by_set_sizes = 1.0 - static_cast<double>(N2) / (std::pow(total, p) - static_cast<double>(N1));
  if (n) {
    if (*n < 2) throw ParameterError("point count n must be >= 2");
    const double nn = static_cast<double>(*n);
    out.by_point_count = 1.0 - 1.0 / (std::pow(nn, p) - nn + 1.0);
  }
  return out;
}

SingularBounds singular_bounds(Index m, Index d, const SubgaussianProfile& profile) {
  profile.validate();
  if (m < 1 || d < 1) throw ParameterError("dimensions must be >= 1");
  if (m > d) throw ParameterError("singular value bounds need m <= d");
  const double sm = std::sqrt(static_cast<double>(m));
  const double sd = std::sqrt(static_cast<double>(d));
  const double ct = profile.c_kappa_sq * profile.t;
  return {(sd - ct) / sm - profile.c_kappa_sq, (sd + ct) / sm + profile.c_kappa_sq};
}

namespace {

constexpr Index kExactSvdLimit = 512;
constexpr double kIterTol = 1e-10;
constexpr int kIterMax = 10000;

// Largest eigenvalue of a symmetric PSD matrix by power iteration, or the
// smallest when `solver` is given (inverse iteration).
double iterate_extreme(const Eigen::MatrixXd& M, const Eigen::LDLT<Eigen::MatrixXd>* solver) {
  Eigen::VectorXd v = Eigen::VectorXd::Ones(M.rows()).normalized();
  double lambda = 0.0;
  for (int it = 0; it < kIterMax; ++it) {
    Eigen::VectorXd w = solver ? Eigen::VectorXd(solver->solve(v)) : Eigen::VectorXd(M * v);
    const double norm = w.norm();
    if (!(norm > 0.0)) return 0.0;
    v = w / norm;
    lambda = v.dot(M * v);
    if ((M * v - lambda * v).norm() <= kIterTol * std::max(1.0, std::abs(lambda))) break;
  }
  return lambda;
}

}  // namespace

ExtremeSingularValues extreme_singular_values(const Matrix& pi) {
  if (pi.rows() <= kExactSvdLimit || pi.cols() <= kExactSvdLimit) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(pi);
    const auto& s = svd.singularValues();
    return {s(0), s(s.size() - 1)};
  }
  const Eigen::MatrixXd gram = pi.rows() <= pi.cols() ? Eigen::MatrixXd(pi * pi.transpose())
                                                      : Eigen::MatrixXd(pi.transpose() * pi);
  const double top = iterate_extreme(gram, nullptr);
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  const double bottom = ldlt.info() == Eigen::Success ? iterate_extreme(gram, &ldlt) : 0.0;
  return {std::sqrt(std::max(top, 0.0)), std::sqrt(std::max(bottom, 0.0))};
}

bool check_singular_bounds(const ProjectionMatrix& pi, const SubgaussianProfile& profile) {
  const auto bounds = singular_bounds(pi.m, pi.d, profile);
  const auto s = extreme_singular_values(pi.values);
  return bounds.lower <= s.smallest && s.largest <= bounds.upper;
}

}  // namespace rpcc
