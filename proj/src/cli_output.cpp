#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <system_error>

#include "wavecoh/cli.hpp"
#include "wavecoh/error.hpp"

namespace wavecoh::cli {

std::string format_number(double v) {
    if (std::isnan(v)) return "NaN";
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

namespace {

template <typename Cell>
std::string grid_text(Eigen::Index rows, Eigen::Index cols, std::span<const double> periods,
                      std::span<const double> times, Cell cell) {
    std::string out = "period";
    for (double t : times) {
        out += ',';
        out += format_number(t);
    }
    out += '\n';
    for (Eigen::Index j = 0; j < rows; ++j) {
        out += format_number(periods[static_cast<std::size_t>(j)]);
        for (Eigen::Index i = 0; i < cols; ++i) {
            out += ',';
            out += cell(j, i);
        }
        out += '\n';
    }
    return out;
}

}  // namespace

std::string grid_csv(const RealGrid& grid, std::span<const double> periods, std::span<const double> times) {
    return grid_text(grid.rows(), grid.cols(), periods, times,
                     [&](Eigen::Index j, Eigen::Index i) { return format_number(grid(j, i)); });
}

std::string mask_csv(const MaskGrid& mask, std::span<const double> periods, std::span<const double> times) {
    return grid_text(mask.rows(), mask.cols(), periods, times,
                     [&](Eigen::Index j, Eigen::Index i) { return std::string(mask(j, i) ? "1" : "0"); });
}

std::string series_csv(const TimeSeries& series) {
    std::string out = "time,value\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        out += format_number(series.time(i));
        out += ',';
        out += format_number(series.values()[i]);
        out += '\n';
    }
    return out;
}

void write_atomic(const std::filesystem::path& path, std::string_view bytes) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::system_error(errno, std::generic_category(), "cannot write " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw std::system_error(errno, std::generic_category(), "short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string file_checksum(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::FileUnreadable, "cannot open " + path.string());
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[1 << 14];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        for (std::streamsize k = 0; k < in.gcount(); ++k) {
            h ^= static_cast<unsigned char>(buf[k]);
            h *= 0x100000001b3ULL;
        }
    }
    std::ostringstream hex;
    hex << std::hex << std::setw(16) << std::setfill('0') << h;
    return hex.str();
}

}  // namespace wavecoh::cli
