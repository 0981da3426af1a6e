#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "surfint/analysis.hpp"

namespace surfint {

// Rounds to `digits` significant digits; non-finite values pass through.
double round_significant(double x, int digits = 12);

// Report document without a timestamp; NaN values become null.
nlohmann::ordered_json report_json(const StudyConfig& config, const StudyResult& result);

// One row per eigenvalue index n.
std::string report_csv(const StudyResult& result);

// One row per level with the per-n eigenvalues, followed by the Richardson summary.
std::string convergence_csv(const StudyResult& result);

// Writes through a temporary file in the same directory and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string utc_timestamp();

}  // namespace surfint
