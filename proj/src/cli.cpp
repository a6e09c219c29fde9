#include "wavecoh/cli.hpp"

#include <cmath>
#include <filesystem>
#include <functional>
#include <numbers>
#include <optional>
#include <ostream>
#include <system_error>

#include <CLI11.hpp>
#include <json.hpp>

#include "wavecoh/coherence.hpp"
#include "wavecoh/cwt.hpp"
#include "wavecoh/error.hpp"
#include "wavecoh/ingest.hpp"
#include "wavecoh/pfa.hpp"
#include "wavecoh/render.hpp"
#include "wavecoh/significance.hpp"

namespace wavecoh::cli {

namespace {

using json = nlohmann::ordered_json;

// Carries an exit code out of a pipeline stage.
struct Failure {
    int code;
    std::string message;
};

bool is_ingest_error(Errc c) {
    switch (c) {
        case Errc::FileUnreadable:
        case Errc::MalformedRow:
        case Errc::MissingValue:
        case Errc::NonUniformStep:
        case Errc::EmptyAfterParse:
        case Errc::HeaderOnlyFile:
        case Errc::SpanMismatch:
        case Errc::NonPositiveStep:
        case Errc::EmptySeries:
        case Errc::NonFiniteValue:
            return true;
        default:
            return false;
    }
}

struct GridOptions {
    std::optional<double> s0;
    std::size_t voices = 12;
    std::size_t octaves = 8;
    double omega0 = 6.0;
};

struct InputOptions {
    std::string path;
    std::string format = "generic";
};

void add_grid_options(CLI::App* cmd, GridOptions& g) {
    cmd->add_option("--s0", g.s0, "Smallest scale in years (default 2*dt)");
    cmd->add_option("--voices", g.voices, "Voices per octave")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--octaves", g.octaves, "Number of octaves")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--omega0", g.omega0, "Morlet nondimensional centre frequency")->capture_default_str();
}

CLI::Option* add_format(CLI::App* cmd, const std::string& name, std::string& target) {
    return cmd->add_option(name, target, "Input format")
        ->capture_default_str()
        ->check(CLI::IsMember({"tsi", "amo", "generic"}));
}

TimeSeries load(const InputOptions& in) {
    if (in.format == "tsi") return ingest::load_tsi(in.path);
    if (in.format == "amo") return ingest::load_amo(in.path);
    ingest::DatasetDescriptor desc(ingest::SourceKind::generic_two_column, in.path);
    return ingest::load_generic(desc);
}

// Runs `body`, translating library errors into exit codes for this stage.
template <typename F>
auto stage(int numeric_code, F&& body) -> decltype(body()) {
    try {
        return body();
    } catch (const Error& e) {
        if (is_ingest_error(e.code())) throw Failure{exit_ingest, e.what()};
        throw Failure{numeric_code, e.what()};
    }
}

struct Setup {
    cwt::MorletParams params;
    cwt::ScaleGrid grid;
};

Setup make_setup(const GridOptions& g, double dt) {
    try {
        Setup s{cwt::MorletParams::from_omega0(g.omega0), {}};
        s.params.validate();
        s.grid = cwt::make_scale_grid(g.s0.value_or(2.0 * dt), g.voices, g.octaves, s.params);
        s.grid.validate_for(dt);
        return s;
    } catch (const Error& e) {
        throw Failure{exit_usage, e.what()};
    }
}

json input_meta(const InputOptions& in, const TimeSeries& s) {
    return json{{"path", in.path},
                {"format", in.format},
                {"fnv1a64", file_checksum(in.path)},
                {"first_epoch", s.t0()},
                {"last_epoch", s.t_end()},
                {"samples", s.size()},
                {"dt", s.dt()}};
}

json grid_meta(const Setup& s, const GridOptions& g) {
    return json{{"s0", s.grid.s0},
                {"voices_per_octave", s.grid.voices_per_octave},
                {"octaves", g.octaves},
                {"num_scales", s.grid.num_scales},
                {"padding", "next_pow2"},
                {"wavelet",
                 {{"family", "morlet"},
                  {"omega0", s.params.omega0()},
                  {"center_frequency", s.params.center_frequency},
                  {"fwhm", s.params.fwhm},
                  {"fourier_factor", s.grid.fourier_factor},
                  {"coi_constant", cwt::coi_constant(s.params)}}}};
}

std::string coi_csv(std::span<const double> times, std::span<const double> coi) {
    std::string out = "time,coi_period\n";
    for (std::size_t i = 0; i < times.size(); ++i) {
        out += format_number(times[i]) + "," + format_number(coi[i]) + "\n";
    }
    return out;
}

void emit(const std::string& prefix, const std::string& suffix, std::string_view bytes, json& written) {
    const std::string path = prefix + suffix;
    try {
        write_atomic(path, bytes);
    } catch (const std::exception& e) {
        throw Failure{exit_output, e.what()};
    }
    written.push_back(path);
}

std::string as_text(const std::vector<std::uint8_t>& bytes) { return std::string(bytes.begin(), bytes.end()); }

render::RenderSpec image_spec(render::Colormap map, Eigen::Index rows, Eigen::Index cols) {
    render::RenderSpec spec;
    spec.colormap = map;
    spec.width = static_cast<int>(std::max<Eigen::Index>(16, cols));
    spec.height = static_cast<int>(std::max<Eigen::Index>(16, 3 * rows));
    return spec;
}

std::string describe_smoothing(const coherence::SmoothingSpec& s) {
    return s.time_kernel == coherence::TimeKernel::delta ? "delta" : "morlet_envelope";
}

// ---------------------------------------------------------------------------

struct CwtArgs {
    InputOptions input;
    GridOptions grid;
    std::string prefix;
    bool detrend = false;
    bool standardize = false;
};

int cmd_cwt(const CwtArgs& a, const std::vector<std::string>& argv, std::ostream& out) {
    TimeSeries series = stage(exit_ingest, [&] { return load(a.input); });
    const Setup setup = make_setup(a.grid, series.dt());

    const auto spec = stage(exit_numeric, [&] {
        TimeSeries s = series;
        if (a.detrend) s = detrend_linear(s);
        if (a.standardize) s = standardize(s);
        return cwt::transform(s, setup.grid, setup.params);
    });
    const RealGrid pw = cwt::power(spec);
    const auto periods = setup.grid.periods();
    const auto times = spec.times();

    json written = json::array();
    emit(a.prefix, ".power.csv", grid_csv(pw, periods, times), written);
    emit(a.prefix, ".coi.csv", coi_csv(times, spec.coi), written);
    const auto image = stage(exit_numeric, [&] {
        return render::render_pixmap(pw, image_spec(render::Colormap::gray, pw.rows(), pw.cols()), periods, spec.coi);
    });
    emit(a.prefix, ".power.pgm", as_text(image), written);

    json meta{{"command", "cwt"},
              {"argv", argv},
              {"input", input_meta(a.input, series)},
              {"preprocessing", {{"detrend", a.detrend}, {"standardize", a.standardize}}},
              {"grid", grid_meta(setup, a.grid)},
              {"layout", "rows = periods (first column), columns = epochs (first row)"}};
    written.push_back(a.prefix + ".meta.json");
    meta["outputs"] = written;
    emit(a.prefix, ".meta.json", meta.dump(2) + "\n", written);

    out << "cwt: " << pw.rows() << " scales x " << pw.cols() << " epochs -> " << a.prefix << ".*\n";
    return exit_ok;
}

// ---------------------------------------------------------------------------

struct CoherenceArgs {
    InputOptions x;
    InputOptions y;
    GridOptions grid;
    std::string prefix;
    std::size_t surrogates = 300;
    double alpha = 0.05;
    std::uint64_t seed = 1;
    std::optional<std::size_t> scale_window;
    unsigned workers = 0;
    bool detrend = false;
};

std::pair<TimeSeries, TimeSeries> load_pair(const InputOptions& x, const InputOptions& y) {
    TimeSeries sx = stage(exit_ingest, [&] { return load(x); });
    TimeSeries sy = stage(exit_ingest, [&] { return load(y); });
    try {
        auto pair = overlap(sx, sy);
        return {std::move(pair.a), std::move(pair.b)};
    } catch (const Error& e) {
        throw Failure{exit_alignment, e.what()};
    }
}

int cmd_coherence(const CoherenceArgs& a, const std::vector<std::string>& argv, std::ostream& out) {
    auto [x, y] = load_pair(a.x, a.y);
    const Setup setup = make_setup(a.grid, x.dt());

    significance::McConfig mc;
    mc.n_surrogates = a.surrogates;
    mc.alpha = a.alpha;
    mc.seed = a.seed;
    mc.workers = a.workers;
    coherence::SmoothingSpec smoothing = coherence::SmoothingSpec::defaults(setup.grid.voices_per_octave);
    if (a.scale_window) smoothing.scale_window = *a.scale_window;
    try {
        mc.validate();
        const coherence::Smoother probe(setup.grid, 1, x.dt(), setup.params, smoothing);
    } catch (const Error& e) {
        throw Failure{exit_usage, e.what()};
    }

    const TimeSeries xs = stage(exit_numeric, [&] { return standardize(a.detrend ? detrend_linear(x) : x); });
    const TimeSeries ys = stage(exit_numeric, [&] { return standardize(a.detrend ? detrend_linear(y) : y); });

    const auto result = stage(exit_numeric, [&] {
        const auto wx = cwt::transform(xs, setup.grid, setup.params);
        const auto wy = cwt::transform(ys, setup.grid, setup.params);
        return coherence::coherence(wx, wy, smoothing);
    });
    const auto thresholds = stage(exit_numeric, [&] {
        return significance::mc_thresholds(xs, ys, setup.grid, setup.params, smoothing, mc);
    });
    const MaskGrid mask = significance::significance_mask(result, thresholds);

    const auto periods = setup.grid.periods();
    const auto times = result.times();
    json written = json::array();
    emit(a.prefix, ".r2.csv", grid_csv(result.r2, periods, times), written);
    emit(a.prefix, ".phase.csv", grid_csv(result.phase, periods, times), written);
    emit(a.prefix, ".mask.csv", mask_csv(mask, periods, times), written);
    std::string thr = "period,threshold\n";
    for (std::size_t j = 0; j < thresholds.size(); ++j) {
        thr += format_number(periods[j]) + "," + format_number(thresholds[j]) + "\n";
    }
    emit(a.prefix, ".thresholds.csv", thr, written);

    auto r2_spec = image_spec(render::Colormap::linear_heat, result.r2.rows(), result.r2.cols());
    r2_spec.value_range = std::make_pair(0.0, 1.0);
    emit(a.prefix, ".r2.ppm", as_text(render::render_pixmap(result.r2, r2_spec, periods, result.coi, &mask)), written);
    auto phase_spec = image_spec(render::Colormap::diverging_phase, result.r2.rows(), result.r2.cols());
    phase_spec.value_range = std::make_pair(-std::numbers::pi, std::numbers::pi);
    emit(a.prefix, ".phase.ppm", as_text(render::render_pixmap(result.phase, phase_spec, periods, result.coi, &mask)),
         written);

    const auto significant = mask.count();
    json meta{{"command", "coherence"},
              {"argv", argv},
              {"input_x", input_meta(a.x, x)},
              {"input_y", input_meta(a.y, y)},
              {"overlap", {{"first_epoch", x.t0()}, {"last_epoch", x.t_end()}, {"samples", x.size()}}},
              {"preprocessing", {{"detrend", a.detrend}, {"standardize", true}}},
              {"grid", grid_meta(setup, a.grid)},
              {"smoothing",
               {{"time_kernel", describe_smoothing(smoothing)},
                {"truncation_efolds", smoothing.truncation_efolds},
                {"scale_window_voices", smoothing.scale_window}}},
              {"significance",
               {{"surrogate_kind", "phase_randomized"},
                {"n_surrogates", mc.n_surrogates},
                {"alpha", mc.alpha},
                {"seed", mc.seed},
                {"seed_derivation", "splitmix64(seed ^ splitmix64(2*k + stream + 1)), stream 0 = x, 1 = y"},
                {"pooling", "per scale, cells with period < coi"},
                {"significant_cells", significant}}},
              {"layout", "rows = periods (first column), columns = epochs (first row); NaN = undefined"}};
    written.push_back(a.prefix + ".meta.json");
    meta["outputs"] = written;
    emit(a.prefix, ".meta.json", meta.dump(2) + "\n", written);

    out << "coherence: " << result.r2.rows() << " scales x " << result.r2.cols() << " epochs, " << significant
        << " significant cells -> " << a.prefix << ".*\n";
    return exit_ok;
}

// ---------------------------------------------------------------------------

struct PfaArgs {
    InputOptions x;
    InputOptions y;
    std::optional<double> p0;
    std::optional<std::size_t> harmonics;
    std::vector<std::string> bands;
    std::optional<double> corr_from;
    std::optional<double> corr_to;
    std::string prefix;
};

pfa::BandSpec parse_band(const std::string& text) {
    const auto colon = text.find(':');
    auto bad = [&] { return Failure{exit_usage, "--band expects M1:M2 with 1 <= M1 <= M2, got '" + text + "'"}; };
    if (colon == std::string::npos) throw bad();
    std::size_t m1 = 0;
    std::size_t m2 = 0;
    try {
        std::size_t used = 0;
        const std::string lhs = text.substr(0, colon);
        const std::string rhs = text.substr(colon + 1);
        m1 = std::stoul(lhs, &used);
        if (used != lhs.size()) throw bad();
        m2 = std::stoul(rhs, &used);
        if (used != rhs.size()) throw bad();
    } catch (const std::logic_error&) {
        throw bad();
    }
    if (m1 < 1 || m1 > m2) throw bad();
    return {m1, m2};
}

json sigma_json(const pfa::PfaModel& model, const pfa::BandSpec& band) {
    json out = json::array();
    for (std::size_t k = band.m1; k <= band.m2; ++k) {
        const auto& c = model.coeffs[k - 1];
        const auto& s = model.sigma[k - 1];
        out.push_back({{"k", k}, {"a", c.a}, {"b", c.b}, {"sigma_a", s.a}, {"sigma_b", s.b}});
    }
    return out;
}

int cmd_pfa(const PfaArgs& a, const std::vector<std::string>& argv, std::ostream& out) {
    std::vector<pfa::BandSpec> bands;
    for (const auto& b : a.bands) bands.push_back(parse_band(b));

    auto [x, y] = load_pair(a.x, a.y);
    const double p0 = a.p0.value_or(pfa::default_base_period(x));
    const std::size_t n = a.harmonics.value_or(pfa::default_harmonics(x.size()));
    if (!(p0 > 0.0)) throw Failure{exit_usage, "--p0 must be positive"};
    for (const auto& b : bands) {
        if (b.m2 > n) {
            throw Failure{exit_usage, "band " + std::to_string(b.m1) + ":" + std::to_string(b.m2) +
                                          " exceeds the harmonic count " + std::to_string(n)};
        }
    }

    const auto mx = stage(exit_numeric, [&] { return pfa::fit_pfa(x, p0, n); });
    const auto my = stage(exit_numeric, [&] { return pfa::fit_pfa(y, p0, n); });
    const auto times = x.times();

    // Correlation window, defaults to the whole overlap.
    const double from = a.corr_from.value_or(x.t0());
    const double to = a.corr_to.value_or(x.t_end());
    std::size_t first = 0;
    std::size_t last = 0;
    bool any = false;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] >= from - 1e-9 && times[i] <= to + 1e-9) {
            if (!any) first = i;
            last = i;
            any = true;
        }
    }
    if (!any) throw Failure{exit_usage, "correlation window lies outside the overlap"};

    json written = json::array();
    json band_list = json::array();
    for (const auto& band : bands) {
        const auto cx = pfa::band_component(mx, band, times);
        const auto cy = pfa::band_component(my, band, times);
        std::string csv = "epoch,x,y\n";
        for (std::size_t i = 0; i < times.size(); ++i) {
            csv += format_number(times[i]) + "," + format_number(cx[i]) + "," + format_number(cy[i]) + "\n";
        }
        emit(a.prefix, ".band-" + std::to_string(band.m1) + "-" + std::to_string(band.m2) + ".csv", csv, written);

        const std::span<const double> wx(cx.data() + first, last - first + 1);
        const std::span<const double> wy(cy.data() + first, last - first + 1);
        const double r = stage(exit_numeric, [&] { return pfa::band_correlation(wx, wy); });
        const auto [lo, hi] = pfa::band_periods(mx, band);
        band_list.push_back({{"m1", band.m1},
                             {"m2", band.m2},
                             {"period_lo", lo},
                             {"period_hi", hi},
                             {"pearson_r", r},
                             {"coefficients_x", sigma_json(mx, band)},
                             {"coefficients_y", sigma_json(my, band)}});
    }

    json doc{{"command", "pfa"},
             {"argv", argv},
             {"input_x", input_meta(a.x, x)},
             {"input_y", input_meta(a.y, y)},
             {"overlap", {{"first_epoch", x.t0()}, {"last_epoch", x.t_end()}, {"samples", x.size()}}},
             {"p0", p0},
             {"harmonics", n},
             {"mean_epoch", mx.mean_epoch},
             {"correlation_window", {times[first], times[last]}},
             {"trend_x", {{"f0", mx.f0}, {"f1", mx.f1}, {"sigma_f0", mx.sigma_f0}, {"sigma_f1", mx.sigma_f1}}},
             {"trend_y", {{"f0", my.f0}, {"f1", my.f1}, {"sigma_f0", my.sigma_f0}, {"sigma_f1", my.sigma_f1}}},
             {"residual_rms", {mx.residual_rms, my.residual_rms}},
             {"bands", band_list}};
    written.push_back(a.prefix + ".bands.json");
    doc["outputs"] = written;
    emit(a.prefix, ".bands.json", doc.dump(2) + "\n", written);

    for (const auto& b : band_list) {
        out << "band " << b["m1"].get<std::size_t>() << ":" << b["m2"].get<std::size_t>() << "  periods "
            << b["period_lo"].get<double>() << "-" << b["period_hi"].get<double>() << " yr  r = "
            << b["pearson_r"].get<double>() << "\n";
    }
    return exit_ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Wavelet coherence and partial Fourier analysis of annual time series", "wavecoh"};
    app.require_subcommand(1);

    CwtArgs cwt_args;
    auto* cwt_cmd = app.add_subcommand("cwt", "Morlet scalogram of one series");
    cwt_cmd->add_option("--input", cwt_args.input.path, "Input file")->required();
    add_format(cwt_cmd, "--format", cwt_args.input.format);
    add_grid_options(cwt_cmd, cwt_args.grid);
    cwt_cmd->add_option("--out-prefix", cwt_args.prefix, "Output path prefix")->required();
    cwt_cmd->add_flag("--detrend", cwt_args.detrend, "Remove the least-squares line first");
    cwt_cmd->add_flag("--standardize", cwt_args.standardize, "Scale to zero mean and unit variance first");

    CoherenceArgs coh_args;
    auto* coh_cmd = app.add_subcommand("coherence", "Wavelet coherence, phase and Monte Carlo significance");
    coh_cmd->add_option("--input-x", coh_args.x.path, "First input file")->required();
    add_format(coh_cmd, "--format-x", coh_args.x.format);
    coh_cmd->add_option("--input-y", coh_args.y.path, "Second input file")->required();
    add_format(coh_cmd, "--format-y", coh_args.y.format);
    add_grid_options(coh_cmd, coh_args.grid);
    coh_cmd->add_option("--surrogates", coh_args.surrogates, "Phase-randomized surrogate pairs")->capture_default_str();
    coh_cmd->add_option("--alpha", coh_args.alpha, "Significance level")->capture_default_str();
    coh_cmd->add_option("--seed", coh_args.seed, "Surrogate RNG seed")->capture_default_str();
    coh_cmd->add_option("--scale-window", coh_args.scale_window, "Scale smoothing width in voices (odd)");
    coh_cmd->add_option("--workers", coh_args.workers, "Surrogate worker threads (0 = all cores)")
        ->capture_default_str();
    coh_cmd->add_flag("--detrend", coh_args.detrend, "Remove least-squares lines before standardizing");
    coh_cmd->add_option("--out-prefix", coh_args.prefix, "Output path prefix")->required();

    PfaArgs pfa_args;
    auto* pfa_cmd = app.add_subcommand("pfa", "Partial Fourier approximation and band correlation");
    pfa_cmd->add_option("--input-x", pfa_args.x.path, "First input file")->required();
    add_format(pfa_cmd, "--format-x", pfa_args.x.format);
    pfa_cmd->add_option("--input-y", pfa_args.y.path, "Second input file")->required();
    add_format(pfa_cmd, "--format-y", pfa_args.y.format);
    pfa_cmd->add_option("--p0", pfa_args.p0, "Base period in years (default: overlap span)");
    pfa_cmd->add_option("--harmonics", pfa_args.harmonics, "Harmonic count (default: min((N-2)/2, 120))");
    pfa_cmd->add_option("--band", pfa_args.bands, "Harmonic band M1:M2 (repeatable)")->required();
    pfa_cmd->add_option("--corr-from", pfa_args.corr_from, "First epoch of the correlation window");
    pfa_cmd->add_option("--corr-to", pfa_args.corr_to, "Last epoch of the correlation window");
    pfa_cmd->add_option("--out-prefix", pfa_args.prefix, "Output path prefix")->required();

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n";
        const auto chosen = app.get_subcommands();
        err << (chosen.empty() ? app.help() : chosen.front()->help());
        return exit_usage;
    }

    const std::vector<std::string> echo(args.begin() + (args.empty() ? 0 : 1), args.end());
    try {
        if (cwt_cmd->parsed()) return cmd_cwt(cwt_args, echo, out);
        if (coh_cmd->parsed()) return cmd_coherence(coh_args, echo, out);
        if (pfa_cmd->parsed()) return cmd_pfa(pfa_args, echo, out);
    } catch (const Failure& f) {
        err << "error: " << f.message << "\n";
        return f.code;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_numeric;
    }
    return exit_usage;
}

}  // namespace wavecoh::cli
