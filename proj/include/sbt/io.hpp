#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sbt/analysis.hpp"
#include "sbt/sim.hpp"

namespace sbt::io {

/// Shortest round-trip-safe form with 17 significant digits.
std::string format_double(double v);

/// Fixed-point with `decimals` places; for human-readable table views only.
std::string format_fixed(double v, int decimals);

/// Writes through a temporary sibling and renames on success, so a failed
/// write never leaves a partial file behind.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// One frequency in Hz per line; blank lines and lines starting with '#' skipped.
FrequencyGrid read_grid_file(const std::filesystem::path& path);

std::string grid_to_text(const FrequencyGrid& grid);

/// CSV with header `t,i_grid,v_grid,v_inv`.
std::string trace_to_csv(const SimTrace& trace);

}  // namespace sbt::io
