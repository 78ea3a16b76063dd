#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "rpcc/error.hpp"
#include "rpcc/projection.hpp"

using namespace rpcc;

TEST_CASE("embedding dimensions") {
  const Index expected[] = {1555, 389, 173, 98, 69};
  const double eps[] = {0.2, 0.4, 0.6, 0.8, 0.95};
  for (int k = 0; k < 5; ++k) CHECK(embedding_dim_logn(eps[k], 1000, 9.0) == expected[k]);
  CHECK(embedding_dim_logn(0.975, 10000, 10.0) == 97);
  CHECK(embedding_dim_logk(0.70, 10, 10.0) == 47);
  CHECK(embedding_dim_logk(0.85, 10, 10.0) == 32);
  CHECK(embedding_dim_logk(1.0 - 1e-9, 2, 1.0) == 1);
  CHECK_THROWS_AS(embedding_dim_logn(0.0, 100, 9.0), ParameterError);
  CHECK_THROWS_AS(embedding_dim_logn(1.0, 100, 9.0), ParameterError);
  CHECK_THROWS_AS(embedding_dim_logk(0.5, 1, 9.0), ParameterError);
  CHECK_THROWS_AS(embedding_dim_logn(0.5, 100, 0.0), ParameterError);
}

TEST_CASE("embedding dimension monotonicity") {
  for (double e = 0.05; e < 0.99; e += 0.05) {
    CHECK(embedding_dim_logn(e, 1000, 9.0) >= embedding_dim_logn(e + 0.01, 1000, 9.0));
    CHECK(embedding_dim_logn(e, 1000, 9.0) <= embedding_dim_logn(e, 2000, 9.0));
    CHECK(embedding_dim_logn(e, 1000, 9.0) <= embedding_dim_logn(e, 1000, 10.0));
  }
}

TEST_CASE("projection sampling") {
  const auto a = sample_projection(5, 7, ProjectionFamily::Gaussian, 42);
  const auto b = sample_projection(5, 7, "normal", 42);
  CHECK(a.values == b.values);
  CHECK(a.m == 5);
  CHECK(a.d == 7);
  const auto r = sample_projection(1, 1, "rademacher", 3);
  CHECK(std::abs(r.values(0, 0)) == 1.0);
  const auto r2 = sample_projection(4, 9, ProjectionFamily::Rademacher, 3);
  CHECK((r2.values.array().abs() == 0.5).all());
  CHECK_THROWS_AS(sample_projection(2, 2, "cauchy", 1), ParameterError);
  CHECK_THROWS_AS(sample_projection(0, 2, ProjectionFamily::Gaussian, 1), ParameterError);
  CHECK(a.sidecar_json().find("\"family\"") != std::string::npos);
}

TEST_CASE("columns have unit expected squared norm") {
  const Index d = 20;
  double sum = 0.0, sum_sq = 0.0;
  const int draws = 10000 / static_cast<int>(d);
  int count = 0;
  for (int s = 0; s < draws; ++s) {
    const auto pi = sample_projection(d, d, ProjectionFamily::Gaussian, static_cast<Seed>(1000 + s));
    for (Index c = 0; c < d; ++c, ++count) {
      const double v = pi.values.col(c).squaredNorm();
      sum += v;
      sum_sq += v * v;
    }
  }
  const double mean = sum / count;
  const double se = std::sqrt((sum_sq / count - mean * mean) / count);
  CHECK(std::abs(mean - 1.0) <= 3.0 * se);
}

TEST_CASE("unit vectors keep squared norm one on average") {
  std::mt19937_64 rng(9);
  Vector x = testing::random_data(30, 1, rng).values().col(0);
  x.normalize();
  double sum = 0.0, sum_sq = 0.0;
  const int draws = 10000;
  for (int s = 0; s < draws; ++s) {
    const auto pi = sample_projection(8, 30, ProjectionFamily::Gaussian, static_cast<Seed>(s));
    const double v = (pi.values * x).squaredNorm();
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / draws;
  const double se = std::sqrt((sum_sq / draws - mean * mean) / draws);
  CHECK(std::abs(mean - 1.0) <= 3.0 * se);
}

TEST_CASE("isometry verification") {
  const auto I = make_projection(Matrix::Identity(4, 4));
  std::mt19937_64 rng(10);
  Matrix V = testing::random_data(10, 4, rng).values();
  V.row(3).setZero();
  for (double eps : {1e-9, 0.3, 0.99}) {
    const auto r = verify_isometry(I, V, eps);
    CHECK(r.all_preserved);
    CHECK(r.preserved == 10);
  }
  // Orthonormal rows of unit scale.
  const Eigen::Matrix4d Q = Eigen::HouseholderQR<Eigen::Matrix4d>(Eigen::Matrix4d::Random()).householderQ();
  CHECK(verify_isometry(make_projection(Matrix(Q)), V, 1e-9).all_preserved);

  const auto half = make_projection(Matrix(0.5 * Matrix::Identity(4, 4)));
  const auto bad = verify_isometry(half, V, 0.5, true);
  CHECK(bad.preserved == 1);  // only the zero vector
  CHECK_FALSE(bad.all_preserved);
  CHECK(bad.violations.size() == 9);
  CHECK(bad.fraction == doctest::Approx(0.1));
  CHECK_THROWS_AS(verify_isometry(I, Matrix::Zero(2, 3), 0.5), ParameterError);
}

TEST_CASE("pairwise checker matches explicit differences") {
  std::mt19937_64 rng(11);
  const auto A = testing::random_data(25, 12, rng);
  const auto pairs = all_pairs(25);
  CHECK(pairs.size() == 300);
  Matrix diffs(300, 12);
  for (std::size_t p = 0; p < pairs.size(); ++p) diffs.row(static_cast<Index>(p)) = A.row(pairs[p].first) - A.row(pairs[p].second);
  const PairwiseIsometryChecker checker(A.values(), pairs);
  for (Seed s = 0; s < 5; ++s) {
    const auto pi = sample_projection(6, 12, ProjectionFamily::Gaussian, s);
    const auto r1 = checker.check(pi, 0.4);
    const auto r2 = verify_isometry(pi, diffs, 0.4);
    CHECK(r1.preserved == r2.preserved);
  }
}

TEST_CASE("difference sets") {
  const auto A = testing::rows({{0.0}, {1.0}, {10.0}, {11.0}, {12.0}});
  const auto truth = testing::labels({1, 1, 2, 2, 2});
  const auto s = build_difference_sets(A, truth);
  CHECK(s.N1 == 1 + 3);
  CHECK(s.N2 == 3);
  CHECK(s.centroids(0, 0) == doctest::Approx(34.0 / 5.0));
  CHECK(s.centroids(2, 0) == doctest::Approx(11.0));
  CHECK(s.within_pairs().size() == 4);
  CHECK(s.centroid_differences().rows() == 3);
  CHECK(s.N1 < 10);

  const auto one = build_difference_sets(testing::rows({{0.0}, {2.0}}), Partition::single_cluster(2));
  CHECK(one.N1 == 1);
  CHECK(one.N2 == 1);

  const auto big = build_difference_sets(DataMatrix(Matrix::Zero(1000, 1)), Partition([] {
    std::vector<int> l(1000);
    for (int i = 0; i < 1000; ++i) l[static_cast<std::size_t>(i)] = i / 50 + 1;
    return l;
  }()));
  CHECK(big.N1 == 24500);
  CHECK(big.N2 == 210);
  CHECK(all_pairs(1000).size() == 499500);
}

TEST_CASE("probability bounds") {
  CHECK(union_bound_probability({50, 50}, 0.001) == doctest::Approx(0.9));
  CHECK(union_bound_probability({1}, 1e-300) == 1.0);
  CHECK(union_bound_probability({24926, 210}, 2e-12) == doctest::Approx(1.0 - 25136 * 2e-12).epsilon(1e-15));
  CHECK_THROWS_AS(union_bound_probability({50, 50}, 0.01), ParameterError);
  CHECK_THROWS_AS(union_bound_probability({50, 50}, 0.0), ParameterError);

  const auto b = conditional_recovery_probability(10, 5, 2.0);
  CHECK(b.by_set_sizes == doctest::Approx(1.0 - 5.0 / 215.0));
  CHECK_FALSE(b.by_point_count.has_value());
  const auto c = conditional_recovery_probability(10, 5, 2.0, 100);
  CHECK(*c.by_point_count == doctest::Approx(1.0 - 1.0 / 9901.0));
  CHECK(conditional_recovery_probability(1000000, 1, 2.0).by_set_sizes == doctest::Approx(1.0));
  CHECK_THROWS_AS(conditional_recovery_probability(10, 5, 1.0), ParameterError);
}

TEST_CASE("set-size bound versus point-count bound") {
  // The set-size bound dominates exactly when N2 (n^p - n + 1) <= (N1 + N2)^p - N1.
  for (double p : {1.5, 2.0, 3.0}) {
    for (Index n = 4; n <= 60; n += 7) {
      for (Index N1 = 1; N1 <= n; N1 += 3) {
        for (Index N2 = 1; N2 <= n / 2; ++N2) {
          const auto b = conditional_recovery_probability(N1, N2, p, n);
          const double np = std::pow(static_cast<double>(n), p);
          const double lhs = static_cast<double>(N2) * (np - static_cast<double>(n) + 1.0);
          const double rhs = std::pow(static_cast<double>(N1 + N2), p) - static_cast<double>(N1);
          const double scale = std::max(lhs, rhs);
          if (std::abs(lhs - rhs) <= 1e-9 * scale) continue;
          CHECK((b.by_set_sizes >= *b.by_point_count) == (lhs <= rhs));
        }
      }
    }
  }
  // The claimed ordering can fail for small difference sets.
  const auto c = conditional_recovery_probability(10, 5, 2.0, 100);
  CHECK(c.by_set_sizes < *c.by_point_count);
}

TEST_CASE("singular value bounds") {
  const SubgaussianProfile prof;
  CHECK(singular_bounds(47, 100, prof).upper == doctest::Approx(12.0 / std::sqrt(47.0) + 1.0));
  CHECK(singular_bounds(47, 100, prof).upper == doctest::Approx(2.7504).epsilon(1e-4));
  CHECK(singular_bounds(32, 100, prof).lower == doctest::Approx(0.4142).epsilon(1e-4));
  const auto t0 = singular_bounds(9, 9, {1.0, 0.0});
  CHECK(t0.upper == 2.0);
  CHECK(t0.lower == 0.0);
  CHECK_THROWS_AS(singular_bounds(10, 9, prof), ParameterError);
  CHECK_THROWS_AS(singular_bounds(3, 9, {0.0, 1.0}), ParameterError);

  CHECK(check_singular_bounds(make_projection(Matrix::Identity(6, 6)), {1.0, 0.0}));
  const auto pi = sample_projection(32, 100, ProjectionFamily::Gaussian, 77);
  const auto sv = extreme_singular_values(pi.values);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd(pi.values));
  CHECK(sv.largest == doctest::Approx(svd.singularValues()(0)).epsilon(1e-10));
  CHECK(sv.smallest == doctest::Approx(svd.singularValues()(31)).epsilon(1e-10));
  auto scaled = pi;
  scaled.values *= 10.0;
  CHECK_FALSE(check_singular_bounds(scaled, prof));
}

TEST_CASE("iterative extremes match the exact SVD on a wide matrix") {
  const auto pi = sample_projection(520, 600, ProjectionFamily::Gaussian, 5);
  const auto sv = extreme_singular_values(pi.values);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd(pi.values));
  CHECK(sv.largest == doctest::Approx(svd.singularValues()(0)).epsilon(1e-8));
  CHECK(sv.smallest == doctest::Approx(svd.singularValues()(519)).epsilon(1e-8));
}
