#include "wavecoh/ingest.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "wavecoh/error.hpp"

namespace wavecoh::ingest {

namespace {

struct Sample {
    double time;
    double value;
    std::size_t line;
};

std::string where(const std::filesystem::path& path, std::size_t line) {
    return path.string() + ":" + std::to_string(line);
}

bool is_sentinel(double v, const std::vector<double>& sentinels) {
    if (!std::isfinite(v)) return true;
    for (double s : sentinels) {
        if (std::abs(v - s) <= 1e-9 * std::max(1.0, std::abs(s))) return true;
    }
    return false;
}

bool integer_like(double v) { return std::abs(v - std::round(v)) <= 1e-6 && std::abs(v) < 1e6; }

std::vector<Sample> scan(const DatasetDescriptor& desc) {
    std::ifstream in(desc.path);
    if (!in) throw Error(Errc::FileUnreadable, "cannot open " + desc.path.string());

    const bool header_row = desc.source_kind == SourceKind::tsi_lisird;
    const bool year_rows = desc.source_kind == SourceKind::amo_ncei;
    const std::size_t needed = std::max(desc.column_time, desc.column_value) + 1;

    std::vector<Sample> rows;
    bool header_seen = false;
    bool any_content = false;
    std::string line;
    for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        any_content = true;
        const auto fields = split_fields(line);
        const auto time = fields.size() > desc.column_time ? parse_number(fields[desc.column_time]) : std::nullopt;

        if (header_row) {
            if (!header_seen && !time) {
                header_seen = true;
                continue;
            }
            header_seen = true;
        } else if (!time) {
            // Prose: the time field is not numeric.
            continue;
        } else if (year_rows && (fields.size() < needed || !parse_number(fields[desc.column_value]))) {
            // Prose that happens to open with a number, e.g. "1200 years of ...".
            continue;
        }
        if (!time || fields.size() < needed) {
            throw Error(Errc::MalformedRow, "expected " + std::to_string(needed) + " numeric fields at " +
                                                where(desc.path, lineno), lineno);
        }
        const auto value = parse_number(fields[desc.column_value]);
        if (!value) {
            throw Error(Errc::MalformedRow, "non-numeric value '" + fields[desc.column_value] + "' at " +
                                                where(desc.path, lineno), lineno);
        }
        if (year_rows && !integer_like(*time)) {
            throw Error(Errc::MalformedRow, "time field '" + fields[desc.column_time] +
                                                "' is not a calendar year at " + where(desc.path, lineno), lineno);
        }
        if (!std::isfinite(*time) || is_sentinel(*value, desc.missing_sentinels)) {
            throw Error(Errc::MissingValue, "missing value at " + where(desc.path, lineno), lineno);
        }
        rows.push_back({*time, *value, lineno});
    }
    if (rows.empty()) {
        if (year_rows && any_content) throw Error(Errc::HeaderOnlyFile, desc.path.string() + " has no data rows");
        throw Error(Errc::EmptyAfterParse, desc.path.string() + " has no data rows");
    }
    return rows;
}

std::string default_label(const DatasetDescriptor& desc) {
    if (!desc.label.empty()) return desc.label;
    return desc.path.stem().string();
}

}  // namespace

std::vector<double> default_missing_sentinels() { return {-99.99, -999.9, -999.0, -9999.0, -99999.0}; }

DatasetDescriptor::DatasetDescriptor(SourceKind kind, std::filesystem::path path, std::size_t column_time,
                                     std::size_t column_value)
    : source_kind(kind), path(std::move(path)), column_time(column_time), column_value(column_value) {
    validate();
}

void DatasetDescriptor::validate() const {
    if (column_time == column_value) {
        throw Error(Errc::InvalidArgument, "time and value columns must differ (both " +
                                               std::to_string(column_time) + ")");
    }
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    if (line.find_first_of(",;") != std::string::npos) {
        // Delimited line: keep empty fields so "1,,2" reports a missing column.
        std::size_t pos = 0;
        while (true) {
            const auto next = line.find_first_of(",;", pos);
            std::string field = line.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
            const auto b = field.find_first_not_of(" \t");
            const auto e = field.find_last_not_of(" \t");
            out.push_back(b == std::string::npos ? std::string{} : field.substr(b, e - b + 1));
            if (next == std::string::npos) break;
            pos = next + 1;
        }
        while (!out.empty() && out.back().empty()) out.pop_back();
        return out;
    }
    std::istringstream in(line);
    for (std::string field; in >> field;) out.push_back(field);
    return out;
}

std::optional<double> parse_number(const std::string& field) {
    if (field.empty()) return std::nullopt;
    const char* begin = field.data();
    const char* end = begin + field.size();
    if (*begin == '+') ++begin;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) return std::nullopt;
    return value;
}

TimeSeries load_generic(const DatasetDescriptor& desc) {
    desc.validate();
    const auto rows = scan(desc);

    double dt = 1.0;
    double t0 = 0.0;
    std::vector<double> values;
    values.reserve(rows.size());

    if (desc.source_kind == SourceKind::generic_two_column) {
        // Step inferred from the end points; each row must sit within 1e-6 dt of the grid.
        t0 = rows.front().time;
        if (rows.size() > 1) {
            dt = (rows.back().time - t0) / static_cast<double>(rows.size() - 1);
            if (!(dt > 0.0)) {
                throw Error(Errc::NonUniformStep, "non-increasing time at " + where(desc.path, rows[1].line),
                            rows[1].line);
            }
        }
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const double expected = t0 + static_cast<double>(i) * dt;
            if (std::abs(rows[i].time - expected) > 1e-6 * dt) {
                throw Error(Errc::NonUniformStep, "sample off the uniform grid at " + where(desc.path, rows[i].line),
                            rows[i].line);
            }
            values.push_back(rows[i].value);
        }
    } else {
        // Annual archives: stamps floor to calendar years, which must be consecutive.
        t0 = std::floor(rows.front().time + 1e-9);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const double year = std::floor(rows[i].time + 1e-9);
            if (year != t0 + static_cast<double>(i)) {
                throw Error(Errc::NonUniformStep, "expected year " + std::to_string(static_cast<long long>(t0) +
                                                                                    static_cast<long long>(i)) +
                                                      " at " + where(desc.path, rows[i].line),
                            rows[i].line);
            }
            values.push_back(rows[i].value);
        }
    }

    TimeSeries series(t0, dt, std::move(values), default_label(desc));
    if (desc.expected_span) {
        const auto [first, last] = *desc.expected_span;
        const auto got_first = std::llround(series.t0());
        const auto got_last = std::llround(series.t_end());
        if (got_first != first || got_last != last) {
            std::ostringstream msg;
            msg << desc.path.string() << " spans " << got_first << "-" << got_last << ", expected " << first << "-"
                << last;
            throw Error(Errc::SpanMismatch, msg.str());
        }
    }
    return series;
}

TimeSeries load_tsi(const std::filesystem::path& path) {
    DatasetDescriptor desc(SourceKind::tsi_lisird, path);
    desc.label = "TSI";
    return load_generic(desc);
}

TimeSeries load_amo(const std::filesystem::path& path) {
    DatasetDescriptor desc(SourceKind::amo_ncei, path);
    desc.label = "AMO";
    return load_generic(desc);
}

}  // namespace wavecoh::ingest
