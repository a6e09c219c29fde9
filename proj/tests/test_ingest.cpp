#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include <unistd.h>

#include "oracles.hpp"
#include "wavecoh/cli.hpp"
#include "wavecoh/error.hpp"
#include "wavecoh/ingest.hpp"

using namespace wavecoh;
using ingest::DatasetDescriptor;
using ingest::SourceKind;
namespace fs = std::filesystem;

namespace {

/// Scratch file removed when the fixture goes out of scope.
struct TempFile {
    fs::path path;

    explicit TempFile(const std::string& contents, const std::string& name = "fixture.txt") {
        static int counter = 0;
        const auto dir = fs::temp_directory_path() / ("wavecoh-ingest-" + std::to_string(::getpid()));
        fs::create_directories(dir);
        path = dir / (std::to_string(counter++) + "-" + name);
        std::ofstream(path, std::ios::binary) << contents;
    }
    ~TempFile() { fs::remove(path); }
};

struct Caught {
    Errc code;
    std::optional<std::size_t> line;
};

Caught caught(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return {e.code(), e.detail()};
    }
    FAIL("expected an error");
    return {Errc::InvalidArgument, std::nullopt};
}

std::vector<double> values(const TimeSeries& s) { return {s.values().begin(), s.values().end()}; }

}  // namespace

TEST_CASE("TSI: one header row, mid-year stamps floor to years") {
    TempFile f("time,irradiance\n1900.5,1360.1\n");
    const auto s = ingest::load_tsi(f.path);
    CHECK(s.size() == 1);
    CHECK(s.t0() == 1900.0);
    CHECK(s.dt() == 1.0);
    CHECK(s.values()[0] == 1360.1);
    CHECK(s.label() == "TSI");

    TempFile longer("time (yr),TSI (W/m^2),uncertainty\r\n850.5,1360.7,0.1\r\n851.5,1360.6,0.1\r\n852.5,1360.8,0.1\r\n");
    const auto t = ingest::load_tsi(longer.path);
    CHECK(t.t0() == 850.0);
    CHECK(values(t) == std::vector<double>{1360.7, 1360.6, 1360.8});
}

TEST_CASE("TSI: errors carry the 1-based line number") {
    TempFile bad_value("time,irradiance\n1900.5,1360.1\n1901.5,abc\n");
    auto c = caught([&] { ingest::load_tsi(bad_value.path); });
    CHECK(c.code == Errc::MalformedRow);
    CHECK(c.line == 3);

    TempFile bad_time("time,irradiance\n1900.5,1360.1\nx1901,1360.2\n");
    c = caught([&] { ingest::load_tsi(bad_time.path); });
    CHECK(c.code == Errc::MalformedRow);
    CHECK(c.line == 3);

    TempFile short_row("time,irradiance\n1900.5,1360.1\n1901.5\n");
    c = caught([&] { ingest::load_tsi(short_row.path); });
    CHECK(c.code == Errc::MalformedRow);
    CHECK(c.line == 3);

    TempFile gap("time,irradiance\n1900.5,1\n1901.5,2\n1903.5,3\n");
    c = caught([&] { ingest::load_tsi(gap.path); });
    CHECK(c.code == Errc::NonUniformStep);
    CHECK(c.line == 4);

    TempFile sentinel("time,irradiance\n1900.5,1360.1\n1901.5,-999.9\n");
    c = caught([&] { ingest::load_tsi(sentinel.path); });
    CHECK(c.code == Errc::MissingValue);
    CHECK(c.line == 3);

    TempFile header_only("time,irradiance\n");
    CHECK(caught([&] { ingest::load_tsi(header_only.path); }).code == Errc::EmptyAfterParse);

    CHECK(caught([] { ingest::load_tsi("/nonexistent/wavecoh/tsi.csv"); }).code == Errc::FileUnreadable);
}

TEST_CASE("AMO: prose lines are skipped, whitespace rows are parsed") {
    TempFile f(
        "Wang et al. 2017 multivariate AMO reconstruction\n"
        "1200 years of reconstructed index values\n"
        "  year   amo\n"
        "800 0.12\n"
        "801\t-0.05\n");
    const auto s = ingest::load_amo(f.path);
    CHECK(s.size() == 2);
    CHECK(s.t0() == 800.0);
    CHECK(values(s) == std::vector<double>{0.12, -0.05});
    CHECK(s.label() == "AMO");

    TempFile commented("# comment\n\n800 1 extra\n801 2 extra\n# trailing\n");
    CHECK(values(ingest::load_amo(commented.path)) == std::vector<double>{1, 2});
}

TEST_CASE("AMO: gaps, sentinels, fractional years and prose-only files") {
    TempFile gap("header\n800 0.1\n801 0.2\n803 0.3\n");
    auto c = caught([&] { ingest::load_amo(gap.path); });
    CHECK(c.code == Errc::NonUniformStep);
    CHECK(c.line == 4);

    TempFile sentinel("header\n800 0.1\n801 -99.99\n");
    c = caught([&] { ingest::load_amo(sentinel.path); });
    CHECK(c.code == Errc::MissingValue);
    CHECK(c.line == 3);

    TempFile nan("800 0.1\n801 NaN\n");
    c = caught([&] { ingest::load_amo(nan.path); });
    CHECK(c.code == Errc::MissingValue);
    CHECK(c.line == 2);

    TempFile fractional("800 0.1\n800.5 0.2\n");
    c = caught([&] { ingest::load_amo(fractional.path); });
    CHECK(c.code == Errc::MalformedRow);
    CHECK(c.line == 2);

    TempFile prose("A reconstruction\nwith no data\n");
    CHECK(caught([&] { ingest::load_amo(prose.path); }).code == Errc::HeaderOnlyFile);

    TempFile empty("");
    CHECK(caught([&] { ingest::load_amo(empty.path); }).code == Errc::EmptyAfterParse);
}

TEST_CASE("split_fields and parse_number") {
    using V = std::vector<std::string>;
    CHECK(ingest::split_fields("1900.5,1360.1") == V{"1900.5", "1360.1"});
    CHECK(ingest::split_fields("  800   0.12  ") == V{"800", "0.12"});
    CHECK(ingest::split_fields("1 ; 2 ;3") == V{"1", "2", "3"});
    CHECK(ingest::split_fields("1,,2") == V{"1", "", "2"});
    CHECK(ingest::split_fields("a\tb") == V{"a", "b"});

    CHECK(ingest::parse_number("1.5e3") == 1500.0);
    CHECK(ingest::parse_number("+2") == 2.0);
    CHECK(ingest::parse_number("-0.05") == -0.05);
    CHECK_FALSE(ingest::parse_number(""));
    CHECK_FALSE(ingest::parse_number("1.5x"));
    CHECK_FALSE(ingest::parse_number("year"));
}

TEST_CASE("descriptor invariants and generic loading") {
    CHECK(caught([] { DatasetDescriptor(SourceKind::generic_two_column, "x", 1, 1); }).code ==
          Errc::InvalidArgument);

    TempFile tsi_like("time,irradiance\n1900.5,1360.1\n1901.5,1360.3\n");
    DatasetDescriptor as_tsi(SourceKind::tsi_lisird, tsi_like.path);
    as_tsi.label = "TSI";
    const auto a = ingest::load_generic(as_tsi);
    const auto b = ingest::load_tsi(tsi_like.path);
    CHECK(a.t0() == b.t0());
    CHECK(a.dt() == b.dt());
    CHECK(values(a) == values(b));
    CHECK(a.label() == b.label());

    TempFile columns("# t flag value\n0.0 9 1.5\n0.25 9 2.5\n0.5 9 3.5\n");
    DatasetDescriptor desc(SourceKind::generic_two_column, columns.path, 0, 2);
    const auto g = ingest::load_generic(desc);
    CHECK(g.t0() == 0.0);
    CHECK(g.dt() == 0.25);
    CHECK(values(g) == std::vector<double>{1.5, 2.5, 3.5});

    TempFile uneven("0 1\n1 2\n3 3\n4 4\n");
    const auto c = caught([&] { ingest::load_generic(DatasetDescriptor(SourceKind::generic_two_column, uneven.path)); });
    CHECK(c.code == Errc::NonUniformStep);
    CHECK(c.line == 2);

    TempFile custom_sentinel("0 1\n1 -1\n");
    DatasetDescriptor strict(SourceKind::generic_two_column, custom_sentinel.path);
    strict.missing_sentinels = {-1.0};
    CHECK(caught([&] { ingest::load_generic(strict); }).code == Errc::MissingValue);
}

TEST_CASE("expected span is enforced") {
    std::string text = "time,irradiance\n";
    for (int y = 850; y <= 1999; ++y) text += std::to_string(y) + ".5,1361\n";
    TempFile f(text);
    DatasetDescriptor desc(SourceKind::tsi_lisird, f.path);
    desc.expected_span = std::pair{850, 2010};
    CHECK(caught([&] { ingest::load_generic(desc); }).code == Errc::SpanMismatch);
    desc.expected_span = std::pair{850, 1999};
    CHECK(ingest::load_generic(desc).size() == 1150);
}

TEST_CASE("loading is deterministic and the CSV emitter round-trips") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 10; ++trial) {
        auto v = oracle::white_noise(1 + rng() % 300, rng());
        for (double& x : v) x = 1361.0 + x * std::pow(10.0, static_cast<double>(rng() % 7) - 3.0);
        const auto original = new_series(850.0, 1.0, v, "TSI");
        TempFile f(cli::series_csv(original), "series.csv");

        const auto once = ingest::load_tsi(f.path);
        const auto twice = ingest::load_tsi(f.path);
        CHECK(values(once) == values(twice));
        CHECK(once.t0() == original.t0());
        REQUIRE(once.size() == original.size());
        for (std::size_t i = 0; i < v.size(); ++i) CHECK(std::abs(once.values()[i] - v[i]) <= 1e-12 * std::abs(v[i]));

        const auto generic = ingest::load_generic(DatasetDescriptor(SourceKind::generic_two_column, f.path));
        CHECK(values(generic) == values(once));
    }
}
