#pragma once

#include <filesystem>
#include <vector>
#include <string>

#include "config.hpp"

namespace rpcc::cli {

/// Non-convergence or another numeric failure that should abort a command.
class NumericFailure : public Error {
 public:
  using Error::Error;
};

/// Artifacts go to a hidden sibling directory first and appear under their
/// final name only once everything is written.
class Staging {
 public:
  Staging(const std::filesystem::path& root, const std::string& command, const std::string& tag);
  ~Staging();
  Staging(const Staging&) = delete;
  Staging& operator=(const Staging&) = delete;

  void write(const std::string& name, const std::string& content);
  void write_json(const std::string& name, const json& doc);
  /// Adds manifest.json and moves the directory into place.
  std::filesystem::path commit(json manifest);

 private:
  std::filesystem::path final_;
  std::filesystem::path temp_;
  std::vector<std::string> files_;
  bool committed_ = false;
};

using Command = void (*)(const ExperimentConfig&, Staging&);

/// nullptr for an unknown name.
Command find_command(const std::string& name);

}  // namespace rpcc::cli
