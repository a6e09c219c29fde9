#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wavecoh/grid.hpp"
#include "wavecoh/series.hpp"

namespace wavecoh::cli {

/// Process exit codes of the batch front end.
enum ExitCode : int {
    exit_ok = 0,
    exit_output = 1,     // an output file could not be written
    exit_usage = 2,      // bad flags, or parameters rejected before any data is read
    exit_ingest = 3,     // input file unreadable or malformed
    exit_numeric = 4,    // numeric failure in a pipeline stage
    exit_alignment = 5,  // inputs share no common interval or grid
};

/// Runs one subcommand (`cwt`, `coherence`, `pfa`). args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Output formatting, shared with tests.

/// Shortest text that round-trips the double; NaN as "NaN".
std::string format_number(double v);

/// First row: "period" followed by the epochs; then one row per scale with the
/// period in the first column.
std::string grid_csv(const RealGrid& grid, std::span<const double> periods, std::span<const double> times);
std::string mask_csv(const MaskGrid& mask, std::span<const double> periods, std::span<const double> times);

/// "time,value" header then one row per sample; readable by the generic and TSI loaders.
std::string series_csv(const TimeSeries& series);

/// Writes via a temporary sibling and rename.
void write_atomic(const std::filesystem::path& path, std::string_view bytes);

/// FNV-1a 64-bit digest of a file's bytes, as 16 hex digits.
std::string file_checksum(const std::filesystem::path& path);

}  // namespace wavecoh::cli
