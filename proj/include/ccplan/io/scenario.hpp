#pragma once

// Scenario files: a JSON document (comments allowed) describing the arm,
// obstacles, noise, query, planner settings and validation protocol.
// docs/scenario-format.md lists every field.

#include "ccplan/collision.hpp"
#include "ccplan/error.hpp"
#include "ccplan/lqg.hpp"
#include "ccplan/planner.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ccplan::io {

inline constexpr int kSchemaVersion = 1;

/// Malformed text or a value that fails validation. The message names the
/// offending field (and line/column for syntax errors).
class ScenarioError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// A file could not be read or written.
class IoError : public std::runtime_error {
 public:
  IoError(const std::string& what, std::filesystem::path path)
      : std::runtime_error(what + ": " + path.string()), path_(std::move(path)) {}
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

struct ValidationConfig {
  std::size_t runs = 100;
  std::uint64_t base_seed = 0;
};

struct Scenario {
  std::string name;
  Environment environment;
  NoiseModel noise;
  Vec start;
  Vec goal;
  PlannerParams planner;
  ValidationConfig validation;

  const ArmSpec& arm() const { return environment.arm; }
};

Scenario parse_scenario(std::string_view text, const std::string& source = "<memory>");
Scenario load_scenario(const std::filesystem::path& path);

/// Every field with its effective value, defaults expanded.
nlohmann::ordered_json scenario_to_json(const Scenario& scenario);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace ccplan::io
