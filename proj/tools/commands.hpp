#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "surfint/analysis.hpp"
#include "surfint/config.hpp"

namespace spec {

inline constexpr int kExitStrict = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitIndistinguishable = 2;
inline constexpr int kExitViolated = 3;

struct CommandOptions {
  std::optional<std::filesystem::path> out;   // overrides outputs.directory
  int jobs = 1;
};

int exit_code(const surfint::StudyResult& r);

int cmd_solve(const surfint::RunConfig& rc, const CommandOptions& opts, std::ostream& log);
int cmd_converge(const surfint::RunConfig& rc, const CommandOptions& opts, std::ostream& log);
int cmd_sweep(const surfint::RunConfig& rc, const CommandOptions& opts, std::ostream& log);
int cmd_oracle(const surfint::RunConfig& rc, const CommandOptions& opts, std::ostream& log);

// Full command line entry point; never throws.
int run(int argc, char** argv);

}  // namespace spec
