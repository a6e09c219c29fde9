#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wavecoh/series.hpp"

namespace wavecoh::ingest {

// Source archives, documented for users; nothing here downloads them.
inline constexpr const char* tsi_source_url = "https://lasp.colorado.edu/lisird/data/nrl2_tsi_P1Y/";
inline constexpr const char* amo_source_url =
    "https://www.ncei.noaa.gov/pub/data/paleo/reconstructions/wang2017/wang2017a_mv-amo.txt";

enum class SourceKind {
    tsi_lisird,          // one header row, then delimited (time, irradiance, ...) rows
    amo_ncei,            // prose lines skipped unless both columns are numeric; integer years
    generic_two_column,  // lines with a non-numeric time field skipped, columns chosen by index
};

/// Sentinels that mark missing values in the supported archives.
std::vector<double> default_missing_sentinels();

struct DatasetDescriptor {
    SourceKind source_kind = SourceKind::generic_two_column;
    std::filesystem::path path;
    std::size_t column_time = 0;
    std::size_t column_value = 1;
    std::optional<std::pair<int, int>> expected_span;  // (first_year, last_year)
    std::vector<double> missing_sentinels = default_missing_sentinels();
    std::string label;

    DatasetDescriptor() = default;
    /// Throws InvalidArgument when the two column indices coincide.
    DatasetDescriptor(SourceKind kind, std::filesystem::path path, std::size_t column_time = 0,
                      std::size_t column_value = 1);

    void validate() const;
};

TimeSeries load_tsi(const std::filesystem::path& path);
TimeSeries load_amo(const std::filesystem::path& path);
TimeSeries load_generic(const DatasetDescriptor& desc);

/// Splits a line on commas, semicolons, tabs and spaces (runs collapse).
std::vector<std::string> split_fields(const std::string& line);

/// Parses a whole field as a finite or non-finite double; nullopt if not numeric.
std::optional<double> parse_number(const std::string& field);

}  // namespace wavecoh::ingest
