#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "surfint/analysis.hpp"

namespace surfint {

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error("config", what) {}
};

enum class SweepParameter { Theta, Alpha, Beta };
const char* to_string(SweepParameter p);

struct SweepSpec {
  SweepParameter parameter = SweepParameter::Theta;
  std::vector<double> values;   // deduplicated, ascending
};

struct CircleOracleSpec {
  double radius = 1.0;
  std::optional<double> alpha;
  std::optional<double> beta;
  int m_max = 3;
};

struct OracleSpec {
  std::vector<double> alpha;
  std::vector<double> beta;
  std::optional<CircleOracleSpec> circle;
};

struct OutputOptions {
  std::filesystem::path directory = "out";
  bool json = true;
  bool csv = true;
  bool svg = true;
  bool mesh = false;
  bool matrices = false;
};

struct RunConfig {
  nlohmann::json source;                 // validated document, kept for sweeps
  std::optional<StudyConfig> study;      // present when geometry is configured
  OutputOptions outputs;
  std::optional<SweepSpec> sweep;
  std::optional<OracleSpec> oracle;
};

// Strict parsing: unknown keys, wrong types and out-of-range values throw ConfigError.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& file);

// Copy of the document with one sweep parameter set to a constant value.
nlohmann::json with_parameter(const nlohmann::json& doc, SweepParameter p, double value);

// SPEC_SEED, when set, must be a non-negative decimal integer.
std::optional<std::uint64_t> seed_from_environment();

}  // namespace surfint
