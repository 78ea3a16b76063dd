#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <Eigen/Core>

#include "commands.hpp"
#include "rpcc/bounds.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kNumericError = 3;
constexpr int kIoError = 4;

const char* const kCommands[][2] = {
    {"gen", "generate or load a data set and write it as CSV"},
    {"weights", "build the fusion weight graph"},
    {"project", "sample projection matrices and embed the data"},
    {"solve", "solve one convex clustering problem at config.gamma"},
    {"path", "sweep the gamma grid (per projection when one is configured)"},
    {"bounds", "gamma bounds, distortion thresholds and recovery intervals"},
    {"verify-jl", "squared-norm preservation rates over many projections"},
    {"kmeans", "k-means on the data or on projected copies"},
    {"compare", "projected convex clustering paths against projected k-means"},
};

nlohmann::json versions() {
  return {{"rpcc", RPCC_VERSION},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
          {"cli11", CLI11_VERSION},
          {"compiler", __VERSION__}};
}

int run(const std::string& command, const std::filesystem::path& config_path, const std::filesystem::path& out_root,
        std::optional<rpcc::Seed> seed, std::string tag, bool dry_run) {
  using namespace rpcc::cli;
  std::ifstream in(config_path);
  if (!in) throw rpcc::IoError("cannot read config " + config_path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw rpcc::ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
  const auto cfg = load_config(doc, seed, config_path.parent_path());
  if (tag.empty()) tag = cfg.hash;
  if (dry_run) {
    std::cout << "config ok (" << command << ", hash " << cfg.hash << ")\n";
    return kOk;
  }
  Staging staging(out_root, command, tag);
  find_command(command)(cfg, staging);
  const auto dir = staging.commit({{"command", command},
                                   {"tag", tag},
                                   {"config_hash", cfg.hash},
                                   {"seed", cfg.seed},
                                   {"versions", versions()},
                                   {"config", cfg.resolved}});
  std::cout << dir.string() << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convex clustering with random projections"};
  app.require_subcommand(1);
  std::filesystem::path config_path;
  std::filesystem::path out_root = "results";
  std::optional<rpcc::Seed> seed;
  std::string tag;
  bool dry_run = false;
  for (const auto& [name, help] : kCommands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "experiment config (JSON)")->required();
    sub->add_option("--out", out_root, "output root directory");
    sub->add_option("--seed", seed, "overrides the config seed");
    sub->add_option("--tag", tag, "result directory name (default: config hash)");
    sub->add_flag("--dry-run", dry_run, "validate the config and stop");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run(command, config_path, out_root, seed, tag, dry_run);
  } catch (const rpcc::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const rpcc::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const rpcc::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const rpcc::AssumptionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumericError;
  } catch (const rpcc::cli::NumericFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumericError;
  } catch (const rpcc::ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const rpcc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumericError;
  }
}
