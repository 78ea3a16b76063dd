#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "helpers.hpp"
#include "rpcc/error.hpp"

using namespace rpcc;

TEST_CASE("data matrix invariants") {
  CHECK_THROWS_AS(DataMatrix(Matrix(0, 2)), ParameterError);
  CHECK_THROWS_AS(DataMatrix(Matrix(2, 0)), ParameterError);
  Matrix bad = Matrix::Zero(2, 2);
  bad(1, 1) = std::nan("");
  CHECK_THROWS_AS(DataMatrix{bad}, ParameterError);
  const auto A = testing::rows({{1, 2}, {3, 6}});
  CHECK(A.mean().isApprox(Eigen::Vector2d(2, 4)));
}

TEST_CASE("partition construction and queries") {
  CHECK_THROWS(Partition(std::vector<int>{1, 3}));
  CHECK_THROWS(Partition(std::vector<int>{0, 1}));
  const std::vector<long> raw{7, 7, -2, 5, -2};
  const auto p = Partition::from_raw(raw);
  CHECK(p.labels() == std::vector<int>{1, 1, 2, 3, 2});
  CHECK(p.K() == 3);
  CHECK(p.sizes() == std::vector<Index>{2, 2, 1});
  CHECK(p.members()[1] == std::vector<Index>{2, 4});
  CHECK(p.same_clusters(testing::labels({3, 3, 1, 2, 1})));
  CHECK_FALSE(p.same_clusters(testing::labels({1, 1, 1, 2, 3})));
  CHECK(testing::labels({2, 2, 1}).canonical() == testing::labels({1, 1, 2}));
  CHECK(Partition::singletons(4).K() == 4);
  CHECK(Partition::single_cluster(4).K() == 1);
}

TEST_CASE("mixture generation") {
  SUBCASE("two separated clusters, balanced") {
    MixtureSpec s;
    s.d = 2;
    s.K = 2;
    s.means = {Eigen::Vector2d(0, 0), Eigen::Vector2d(10, 0)};
    s.variances = {1e-6, 1e-6};
    s.mix_weights = {0.5, 0.5};
    s.n = 4;
    s.seed = 1;
    const auto [A, truth] = generate_mixture(s);
    CHECK(truth.labels() == std::vector<int>{1, 1, 2, 2});
    for (Index i = 0; i < 4; ++i) {
      CHECK((A.row(i).transpose() - s.means[static_cast<std::size_t>(truth.label(i) - 1)]).norm() < 1e-2);
    }
  }
  SUBCASE("zero variance gives the means exactly") {
    MixtureSpec s;
    s.d = 3;
    s.K = 1;
    s.means = {Eigen::Vector3d::Zero()};
    s.variances = {0.0};
    s.mix_weights = {1.0};
    s.n = 5;
    const auto [A, truth] = generate_mixture(s);
    CHECK(A.values().isZero(0.0));
    CHECK(truth.K() == 1);
  }
  SUBCASE("reproducible and exact balanced counts") {
    const auto s = MixtureSpec::basis_means(50, 4, 0.01, 200, 99);
    const auto a = generate_mixture(s);
    const auto b = generate_mixture(s);
    CHECK(a.first.values() == b.first.values());
    CHECK(a.second == b.second);
    CHECK(a.second.sizes() == std::vector<Index>{50, 50, 50, 50});
  }
  SUBCASE("within-cluster squared distances concentrate near 2 d sigma^2") {
    const auto s = MixtureSpec::basis_means(2000, 20, 0.005, 1000, 5);
    const auto [A, truth] = generate_mixture(s);
    const auto mem = truth.members()[0];
    double sum = 0.0;
    int count = 0;
    for (std::size_t a = 0; a < mem.size(); ++a)
      for (std::size_t b = a + 1; b < mem.size(); ++b, ++count) sum += (A.row(mem[a]) - A.row(mem[b])).squaredNorm();
    CHECK(sum / count == doctest::Approx(20.0).epsilon(0.03));
  }
  SUBCASE("cluster means converge") {
    const auto s = MixtureSpec::basis_means(20, 3, 0.5, 900, 6);
    const auto [A, truth] = generate_mixture(s);
    const auto mem = truth.members();
    for (int k = 0; k < 3; ++k) {
      Vector mean = Vector::Zero(20);
      for (Index i : mem[static_cast<std::size_t>(k)]) mean += A.row(i).transpose();
      mean /= static_cast<double>(mem[static_cast<std::size_t>(k)].size());
      const double nk = static_cast<double>(mem[static_cast<std::size_t>(k)].size());
      CHECK((mean - s.means[static_cast<std::size_t>(k)]).norm() <= 5.0 * std::sqrt(0.5) * std::sqrt(20.0 / nk));
    }
  }
  SUBCASE("unbalanced sampling populates labels in 1..K") {
    auto s = MixtureSpec::basis_means(5, 3, 0.1, 300, 7);
    s.balanced = false;
    const auto [A, truth] = generate_mixture(s);
    CHECK(truth.K() == 3);
    CHECK(A.n() == 300);
  }
}

TEST_CASE("invalid mixture specs list every violation") {
  MixtureSpec s;
  s.d = 2;
  s.K = 2;
  s.means = {Eigen::Vector2d(1, 1), Eigen::Vector2d(1, 1)};
  s.variances = {-1.0, 1.0};
  s.mix_weights = {0.5, 0.6};
  s.n = 4;
  try {
    s.validate();
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("means") != std::string::npos);
    CHECK(msg.find("variances") != std::string::npos);
    CHECK(msg.find("mix_weights") != std::string::npos);
  }
}

TEST_CASE("unbalanced fixture") {
  const auto [A, truth] = unbalanced_fixture(10);
  CHECK(A.n() == 7700);
  CHECK(A.d() == 10);
  CHECK(truth.K() == 20);
  const auto sizes = truth.sizes();
  for (int k = 0; k < 20; ++k) CHECK(sizes[static_cast<std::size_t>(k)] == (k < 3 ? 2000 : 100));
  const auto [B, t2] = unbalanced_fixture(200, 200, 10);
  CHECK(B.n() == 770);
}

TEST_CASE("csv parsing") {
  const auto a = parse_csv("1,2\n3,4\n5,6");
  CHECK(a.data.n() == 3);
  CHECK(a.data.d() == 2);
  CHECK_FALSE(a.labels.has_value());

  const auto b = parse_csv("1,2,1\n3,4,2\n", {.has_labels = true});
  REQUIRE(b.labels.has_value());
  CHECK(b.labels->labels() == std::vector<int>{1, 2});
  CHECK(b.data.d() == 2);

  const auto h = parse_csv("x,y\n1,2\n", {.skip_header = true});
  CHECK(h.data.n() == 1);

  auto row_of = [](const std::string& text, CsvOptions o = {}) -> std::size_t {
    try {
      parse_csv(text, o);
    } catch (const ParseError& e) {
      return e.row();
    }
    return 0;
  };
  CHECK(row_of("1,x") == 1);
  CHECK(row_of("1,2\n3") == 2);
  CHECK(row_of("1,2,0.5\n", {.has_labels = true}) == 1);
  CHECK_THROWS_AS(parse_csv(""), ParseError);
}

TEST_CASE("csv round trip") {
  std::mt19937_64 rng(4);
  const auto A = testing::random_data(12, 3, rng, 1e3);
  const auto truth = testing::labels({1, 2, 3, 1, 2, 3, 1, 2, 3, 1, 2, 3});
  const auto path = std::filesystem::temp_directory_path() / "rpcc_roundtrip.csv";
  save_csv(path, A.values(), &truth);
  const auto back = load_csv(path, {.has_labels = true});
  std::filesystem::remove(path);
  CHECK((back.data.values() - A.values()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(*back.labels == truth);
  CHECK_THROWS_AS(load_csv("/nonexistent/file.csv"), IoError);
}
