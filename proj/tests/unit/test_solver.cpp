#include <doctest.h>

#include <cmath>
#include <random>

#include "../oracles/oracles.hpp"
#include "helpers.hpp"
#include "rpcc/error.hpp"
#include "rpcc/solver.hpp"

using namespace rpcc;
using testing::rows;

namespace {

WeightGraph single_edge() { return WeightGraph(2, {{0, 1, 1.0}}); }

}  // namespace

TEST_CASE("gamma zero returns the data untouched") {
  const auto A = rows({{0.0, 1.0}, {2.0, 3.0}, {5.0, -1.0}});
  const WeightGraph g = uniform_weights(3);
  const auto r = solve({A, g, 0.0});
  CHECK(r.X == A.values());
  CHECK(r.iterations == 0);
  CHECK(r.rel_gap == 0.0);
  CHECK(r.success);
  CHECK(extract_partition(r).K() == 3);
}

TEST_CASE("two points move gamma toward each other") {
  const auto A = rows({{0.0}, {2.0}});
  const WeightGraph g = single_edge();
  SolverSettings s;
  s.tol = 1e-12;
  s.residual_tol = 1e-12;
  const auto r = solve({A, g, 0.5}, s);
  REQUIRE(r.success);
  CHECK(r.X(0, 0) == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(r.X(1, 0) == doctest::Approx(1.5).epsilon(1e-8));
  CHECK(extract_partition(r).K() == 2);

  for (double gamma : {1.0, 1.7, 4.0}) {
    const auto f = solve({A, g, gamma}, s);
    REQUIRE(f.success);
    CHECK(f.X(0, 0) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(f.X(1, 0) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(extract_partition(f).K() == 1);
  }
}

TEST_CASE("objective value examples") {
  const auto A = rows({{0.0}, {2.0}});
  const WeightGraph g = single_edge();
  Matrix X(2, 1);
  X << 0.5, 1.5;
  CHECK(objective_value({A, g, 0.5}, X) == doctest::Approx(0.75));
  CHECK(objective_value({A, g, 0.3}, A.values()) == doctest::Approx(0.3 * 2.0));
  Matrix C(2, 1);
  C << 1.0, 1.0;
  CHECK(objective_value({A, g, 9.0}, C) == doctest::Approx(1.0));
  CHECK_THROWS_AS(objective_value({A, g, 1.0}, Matrix::Zero(3, 1)), ParameterError);
}

TEST_CASE("negative gamma and bad settings are rejected") {
  const auto A = rows({{0.0}, {2.0}});
  const WeightGraph g = single_edge();
  CHECK_THROWS_AS(solve({A, g, -1.0}), ParameterError);
  SolverSettings s;
  s.tol = 0.0;
  CHECK_THROWS_AS(solve({A, g, 1.0}, s), ParameterError);
  s = {};
  s.max_iter = 0;
  CHECK_THROWS_AS(solve({A, g, 1.0}, s), ParameterError);
}

TEST_CASE("non-convergence is reported, not thrown") {
  std::mt19937_64 rng(3);
  const auto A = testing::random_data(8, 2, rng);
  const WeightGraph g = uniform_weights(8);
  SolverSettings s;
  s.max_iter = 3;
  s.tol = 1e-14;
  const auto r = solve({A, g, 0.3}, s);
  CHECK_FALSE(r.success);
  CHECK(r.iterations == 3);
  CHECK(r.rel_gap > 1e-14);
}

TEST_CASE("certificate and dual feasibility on random instances") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> gam(0.01, 2.0);
  for (int t = 0; t < 20; ++t) {
    const auto A = testing::random_data(9, 3, rng);
    const auto g = testing::random_graph(9, 0.5, rng);
    const ProblemInstance inst{A, g, gam(rng)};
    const auto r = solve(inst);
    REQUIRE(r.success);
    CHECK(r.rel_gap <= 1e-6);
    CHECK(objective_value(inst, r.X) - r.dual_obj <= 1e-6 * (1 + std::abs(r.primal_obj) + std::abs(r.dual_obj)));
    for (Index e = 0; e < r.dual_edge_vars.rows(); ++e) {
      CHECK(r.dual_edge_vars.row(e).norm() <= inst.gamma * g.edges()[static_cast<std::size_t>(e)].w + 1e-12);
    }
  }
}

TEST_CASE("agrees with the accelerated dual reference") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> gam(0.01, 1.5);
  std::uniform_int_distribution<int> nn(2, 10), dd(1, 3);
  for (int t = 0; t < 15; ++t) {
    const auto A = testing::random_data(nn(rng), dd(rng), rng);
    const auto g = testing::random_graph(A.n(), 0.6, rng);
    const double gamma = gam(rng);
    const auto ours = solve({A, g, gamma});
    const auto ref = oracle::ccm_reference(A.values(), testing::edge_triples(g), gamma);
    REQUIRE(ours.success);
    const double p = objective_value({A, g, gamma}, ours.X);
    CHECK(p >= ref.dual - 1e-12 * (1 + std::abs(ref.dual)));
    CHECK(std::abs(p - ref.primal) <= 1e-5 * std::abs(ref.primal));
  }
}

TEST_CASE("uniform weights with large gamma collapse to the grand mean") {
  std::mt19937_64 rng(5);
  const auto A = testing::random_data(6, 2, rng);
  const WeightGraph g = uniform_weights(6);
  const auto r = solve({A, g, 50.0});
  REQUIRE(r.success);
  CHECK(extract_partition(r).K() == 1);
  const Vector mean = A.mean();
  for (Index i = 0; i < 6; ++i) CHECK((r.X.row(i).transpose() - mean).norm() < 1e-6);
}

TEST_CASE("translation equivariance") {
  std::mt19937_64 rng(6);
  const auto A = testing::random_data(10, 3, rng);
  const auto g = testing::random_graph(10, 0.5, rng);
  Matrix shifted = A.values();
  shifted.rowwise() += Eigen::RowVector3d(3.0, -1.0, 0.5);
  SolverSettings s;
  s.tol = 1e-10;
  const auto r1 = solve({A, g, 0.4}, s);
  const auto r2 = solve({DataMatrix(shifted), g, 0.4}, s);
  Matrix back = r2.X;
  back.rowwise() -= Eigen::RowVector3d(3.0, -1.0, 0.5);
  CHECK((back - r1.X).norm() < 1e-6);
  CHECK(extract_partition(r1) == extract_partition(r2));
}

TEST_CASE("rotation leaves the partition unchanged") {
  std::mt19937_64 rng(7);
  // Two tight groups so that the partition is stable under roundoff.
  Matrix A(8, 3);
  std::normal_distribution<double> g(0.0, 0.05);
  for (Index i = 0; i < 8; ++i)
    for (Index j = 0; j < 3; ++j) A(i, j) = (i < 4 ? 0.0 : 3.0) + g(rng);
  const WeightGraph w = uniform_weights(8);
  const Eigen::Matrix3d Q = Eigen::Quaterniond(Eigen::Vector4d(0.3, -0.2, 0.9, 0.1).normalized()).toRotationMatrix();
  const Matrix AQ = A * Q;
  for (double gamma : {0.01, 0.2, 1.0}) {
    const auto r1 = solve({DataMatrix(A), w, gamma});
    const auto r2 = solve({DataMatrix(AQ), w, gamma});
    CHECK(extract_partition(r1) == extract_partition(r2));
  }
}

TEST_CASE("duplicate rows are always co-clustered") {
  const auto A = rows({{1.0, 2.0}, {1.0, 2.0}, {4.0, 0.0}, {-3.0, 1.0}});
  const WeightGraph g(4, {{0, 1, 1.0}, {1, 2, 0.5}, {2, 3, 0.5}});
  for (double gamma : {1e-6, 1e-3, 0.1}) {
    const auto p = extract_partition(solve({A, g, gamma}));
    CHECK(p.label(0) == p.label(1));
  }
}

TEST_CASE("warm starts certify like cold solves") {
  std::mt19937_64 rng(8);
  const auto A = testing::random_data(10, 2, rng);
  const auto g = testing::random_graph(10, 0.7, rng);
  SolverSettings s;
  s.tol = 1e-11;
  ConvexClusteringSolver warm(A, g, s);
  for (double gamma : {2.0, 1.0, 0.5, 0.2, 0.05}) {
    const auto w = warm.solve(gamma);
    const auto c = solve({A, g, gamma}, s);
    REQUIRE(w.success);
    REQUIRE(c.success);
    CHECK(std::abs(w.primal_obj - c.primal_obj) <= 1e-8 * std::abs(c.primal_obj));
  }
}

TEST_CASE("fused edges join partitions and tau merges near rows") {
  SolveResult r;
  r.X = Matrix(4, 1);
  r.X << 0.0, 5.0, 1e-9, 5.0 + 1e-13;
  r.tau_merge = 1e-8;
  r.fused_edges = {{1, 3}};
  const auto p = extract_partition(r);
  CHECK(p.labels() == std::vector<int>{1, 2, 1, 2});

  r.tau_merge = 0.0;
  r.fused_edges.clear();
  CHECK(extract_partition(r).K() == 4);
}

TEST_CASE("default tau scales with the median edge length") {
  const auto A = rows({{0.0}, {1.0}, {3.0}, {7.0}});
  const WeightGraph g(4, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}});
  CHECK(default_tau_merge(A, g) == doctest::Approx(2e-5));
  const auto Z = rows({{0.0}, {0.0}});
  CHECK(default_tau_merge(Z, single_edge()) == 1e-12);
}
