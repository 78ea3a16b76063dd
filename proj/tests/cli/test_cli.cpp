#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <sys/wait.h>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Workspace {
  Workspace() {
    std::random_device rd;
    root = fs::temp_directory_path() / ("rpcc_cli_" + std::to_string(rd()));
    fs::create_directories(root);
  }
  ~Workspace() {
    std::error_code ec;
    fs::remove_all(root, ec);
  }
  fs::path config(const std::string& name, const json& doc) const {
    const auto p = root / name;
    std::ofstream(p) << doc.dump();
    return p;
  }
  fs::path root;
};

int run(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(RPCC_CLI) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const json kFourPoints = {{"data", {{"points", {{0.0}, {1.0}, {10.0}, {11.0}}}, {"labels", {1, 1, 2, 2}}}},
                          {"weights", {{"mode", "uniform"}}}};

const json kMixture = {{"seed", 3},
                       {"data", {{"mixture", {{"d", 20}, {"K", 3}, {"variance", 0.005}, {"n", 60}}}}},
                       {"weights", {{"mode", "oracle"}, {"k", 5}}},
                       {"grid", "[10:-0.2:2]"}};

}  // namespace

TEST_CASE("bounds on the four-point example") {
  Workspace ws;
  const auto cfg = ws.config("four.json", kFourPoints);
  REQUIRE(run("bounds --config " + cfg.string() + " --out " + (ws.root / "out").string() + " --tag x",
              ws.root / "log") == 0);
  const auto doc = json::parse(slurp(ws.root / "out/bounds/x/bounds.json"));
  CHECK(doc["gamma_min"].get<double>() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(doc["gamma_max"].get<double>() == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(doc["r"].get<double>() == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(doc["exact_interval"]["nonempty"].get<bool>());
  const auto manifest = json::parse(slurp(ws.root / "out/bounds/x/manifest.json"));
  CHECK(manifest["command"] == "bounds");
  CHECK(manifest["config_hash"].get<std::string>().size() == 16);
  CHECK(manifest["versions"].contains("eigen"));
}

TEST_CASE("config errors list every violated field") {
  Workspace ws;
  const auto cfg = ws.config("bad.json", {{"data", {{"mixture", {{"d", 5}, {"K", 3}, {"n", 0}}}}},
                                          {"weights", {{"mode", "nope"}}},
                                          {"solver", {{"tol", -1.0}, {"max_iter", 0}}},
                                          {"typo", 1}});
  CHECK(run("path --config " + cfg.string() + " --dry-run", ws.root / "log") == 2);
  const auto log = slurp(ws.root / "log");
  for (const char* field : {"data.mixture.n", "weights.mode", "solver.tol", "solver.max_iter", "typo"}) {
    CHECK_MESSAGE(log.find(field) != std::string::npos, field);
  }
  CHECK(run("path --config " + (ws.root / "missing.json").string(), ws.root / "log") == 4);
  CHECK(run("nonsense", ws.root / "log") == 2);
  const auto oracle = ws.config("oracle.json", {{"data", {{"points", {{0.0}, {1.0}}}}}, {"weights", {{"mode", "oracle"}}}});
  CHECK(run("weights --config " + oracle.string() + " --dry-run", ws.root / "log") == 2);
}

TEST_CASE("dry run writes nothing") {
  Workspace ws;
  const auto cfg = ws.config("mix.json", kMixture);
  CHECK(run("path --dry-run --config " + cfg.string() + " --out " + (ws.root / "out").string(), ws.root / "log") == 0);
  CHECK_FALSE(fs::exists(ws.root / "out"));
}

TEST_CASE("artifacts are identical across runs") {
  Workspace ws;
  const auto cfg = ws.config("mix.json", kMixture);
  for (const char* cmd : {"gen", "weights", "kmeans"}) {
    REQUIRE(run(std::string(cmd) + " --config " + cfg.string() + " --out " + (ws.root / "a").string() + " --tag t",
                ws.root / "log") == 0);
    REQUIRE(run(std::string(cmd) + " --config " + cfg.string() + " --out " + (ws.root / "b").string() + " --tag t",
                ws.root / "log") == 0);
    for (const auto& entry : fs::directory_iterator(ws.root / "a" / cmd / "t")) {
      const auto other = ws.root / "b" / cmd / "t" / entry.path().filename();
      CHECK_MESSAGE(slurp(entry.path()) == slurp(other), entry.path().string());
    }
  }
  // The seed override changes the data and the default tag.
  REQUIRE(run("gen --seed 4 --config " + cfg.string() + " --out " + (ws.root / "a").string(), ws.root / "log") == 0);
  std::size_t dirs = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(ws.root / "a/gen")) ++dirs;
  CHECK(dirs == 2);
}

TEST_CASE("path on a well separated mixture reaches ARI 1") {
  Workspace ws;
  const auto cfg = ws.config("mix.json", kMixture);
  REQUIRE(run("path --config " + cfg.string() + " --out " + (ws.root / "out").string() + " --tag p",
              ws.root / "log") == 0);
  std::istringstream csv(slurp(ws.root / "out/path/p/path.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "gamma,K_found,RI,ARI,accuracy,rel_gap");
  double best = -1.0;
  int rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    std::istringstream cells(line);
    std::string cell;
    for (int c = 0; c < 4; ++c) std::getline(cells, cell, ',');
    best = std::max(best, std::stod(cell));
  }
  CHECK(rows == 41);
  CHECK(best == 1.0);
}

TEST_CASE("non-convergence exits 3 without artifacts") {
  Workspace ws;
  auto doc = kMixture;
  doc["solver"] = {{"max_iter", 1}, {"tol", 1e-14}};
  const auto cfg = ws.config("slow.json", doc);
  CHECK(run("path --config " + cfg.string() + " --out " + (ws.root / "out").string() + " --tag s",
            ws.root / "log") == 3);
  CHECK_FALSE(fs::exists(ws.root / "out/path/s"));
  CHECK_FALSE(fs::exists(ws.root / "out/path/.s.partial"));
}

TEST_CASE("projection driven commands") {
  Workspace ws;
  auto doc = kMixture;
  doc["projection"] = {{"m", {5, 10}}, {"trials", 2}, {"seed", 11}};
  doc["kmeans"] = {{"replicates", 3}};
  doc["verify"] = {{"epsilon", {0.5}}, {"trials", 20}};
  const auto cfg = ws.config("rp.json", doc);
  const auto out = (ws.root / "out").string();
  for (const char* cmd : {"project", "compare", "verify-jl"}) {
    CHECK(run(std::string(cmd) + " --config " + cfg.string() + " --out " + out + " --tag r", ws.root / "log") == 0);
  }
  CHECK(fs::exists(ws.root / "out/project/r/embedded_m10_t1.csv"));
  CHECK(fs::exists(ws.root / "out/project/r/projection_m5_t0.json"));
  const auto summary = slurp(ws.root / "out/compare/r/compare.csv");
  CHECK(summary.rfind("m,trials,rpccm_recovered,", 0) == 0);
  const auto table = slurp(ws.root / "out/verify-jl/r/verify_jl.csv");
  CHECK(table.rfind("dimension,epsilon,trials,p_XA,XA_pct,p_XV,XV_pct,p_XC,XC_pct,p_S\n", 0) == 0);
}
