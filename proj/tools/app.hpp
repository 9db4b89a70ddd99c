#pragma once

// cusp-spectra: configuration, dispatch and deterministic CSV/JSON emission.

#include "cusp/cusp.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace cusp::app {

inline constexpr const char* kToolName = "cusp-spectra";
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kThreadsEnv = "CUSP_SPECTRA_THREADS";

inline const std::vector<std::string> kCommands = {"bands", "cusp-spectrum", "theorem3",
                                                   "oracle-audit", "curvature"};
inline const std::vector<std::string> kMetrics = {"hyperbolic", "theorem3", "custom-warps"};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string command;
    std::string metric; // empty: chosen by the command
    std::optional<int> n;
    double delta = 0.1;
    double s0 = 0.0;
    double bump_amplitude = 1.0;
    double bump_period = 3.0;
    std::vector<double> slopes; // custom-warps: w_j(s) = slopes[j-1] * s
    double lambda_max = 60.0;
    double resolution = 1e-3;
    std::optional<int> degree;
    std::optional<int> gaps; // number of gap rows to report
    double L = 200.0;
    int N = 40000;
    double margin = 1e-3; // oracle-audit gap depth
    std::optional<double> s_lo;
    std::optional<double> s_hi;
    int grid_points = 4001;
    double k_target = -1.0;
    std::string output_prefix = "cusp-spectra";
    bool timings = false;

    bool operator==(const RunConfig&) const = default;
};

using Json = nlohmann::ordered_json;

struct RunReport {
    Json json;
    std::optional<std::string> bands_csv;
    std::optional<std::string> gaps_csv;
    std::optional<std::string> curvature_csv;
};

// ---------------------------------------------------------------- formatting

/// 17 significant digits; integral values keep a trailing ".0".
inline std::string format_real(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    std::string s(buf);
    if (std::isfinite(x) && s.find_first_of(".eE") == std::string::npos)
        s += ".0";
    return s;
}

inline const char* edge_name(EdgeKind k) {
    switch (k) {
    case EdgeKind::Plus2:
        return "delta=+2";
    case EdgeKind::Minus2:
        return "delta=-2";
    case EdgeKind::Threshold:
        return "threshold";
    case EdgeKind::Cap:
        return "lambda_max";
    }
    return "unknown";
}

inline std::size_t gap_rows(const BandStructure& bs, const RunConfig& cfg) {
    return cfg.gaps ? std::min<std::size_t>(bs.gaps.size(), static_cast<std::size_t>(*cfg.gaps))
                    : bs.gaps.size();
}

inline std::string bands_csv(const BandStructure& bs) {
    std::ostringstream out;
    out << "index,lower,upper\n";
    for (std::size_t i = 0; i < bs.bands.size(); ++i)
        out << i << ',' << format_real(bs.bands[i].lower) << ',' << format_real(bs.bands[i].upper)
            << '\n';
    return out.str();
}

inline std::string gaps_csv(const BandStructure& bs, std::size_t rows) {
    std::ostringstream out;
    out << "index,lower,upper,width,resolved\n";
    for (std::size_t i = 0; i < rows; ++i) {
        const Gap& g = bs.gaps[i];
        out << i << ',' << format_real(g.lower) << ',' << format_real(g.upper) << ','
            << format_real(g.width()) << ',' << (g.resolved ? "true" : "false") << '\n';
    }
    return out.str();
}

inline std::string curvature_csv(const std::vector<CurvatureSample>& samples) {
    std::ostringstream out;
    out << "s,K_min,K_max\n";
    for (const auto& c : samples)
        out << format_real(c.s) << ',' << format_real(c.k_min) << ',' << format_real(c.k_max)
            << '\n';
    return out.str();
}

inline Json spectrum_json(const BandStructure& bs, std::size_t rows) {
    Json bands = Json::array();
    for (std::size_t i = 0; i < bs.bands.size(); ++i) {
        const Band& b = bs.bands[i];
        bands.push_back({{"index", i},
                         {"lower", b.lower},
                         {"upper", b.upper},
                         {"lower_edge", edge_name(b.lower_kind)},
                         {"upper_edge", edge_name(b.upper_kind)}});
    }
    Json gaps = Json::array();
    for (std::size_t i = 0; i < rows; ++i) {
        const Gap& g = bs.gaps[i];
        gaps.push_back({{"index", i},
                        {"lower", g.lower},
                        {"upper", g.upper},
                        {"width", g.width()},
                        {"resolved", g.resolved}});
    }
    return Json{{"lambda_max", bs.lambda_max},
                {"resolution", bs.resolution},
                {"bands", bands},
                {"gaps", gaps},
                {"gaps_below_lambda_max", bs.gaps.size()},
                {"diagnostics",
                 {{"scan_points", bs.diagnostics.scan_points},
                  {"max_det_defect", bs.diagnostics.max_det_defect}}}};
}

inline Json curvature_json(const CurvatureReport& r, double s_lo, double s_hi) {
    return Json{{"s_lo", s_lo},         {"s_hi", s_hi},     {"k_min", r.k_min},
                {"k_max", r.k_max},     {"k_target", r.k_target}, {"pinch", r.pinch},
                {"sample_count", r.sample_count}};
}

// ---------------------------------------------------------------- config

inline Json config_json(const RunConfig& c) {
    Json j;
    j["command"] = c.command;
    j["metric"] = c.metric;
    if (c.n)
        j["n"] = *c.n;
    j["delta"] = c.delta;
    j["s0"] = c.s0;
    j["bump-amplitude"] = c.bump_amplitude;
    j["bump-period"] = c.bump_period;
    j["slopes"] = c.slopes;
    j["lambda-max"] = c.lambda_max;
    j["resolution"] = c.resolution;
    if (c.degree)
        j["degree"] = *c.degree;
    if (c.gaps)
        j["gaps"] = *c.gaps;
    j["L"] = c.L;
    j["N"] = c.N;
    j["margin"] = c.margin;
    if (c.s_lo)
        j["s-lo"] = *c.s_lo;
    if (c.s_hi)
        j["s-hi"] = *c.s_hi;
    j["grid-points"] = c.grid_points;
    j["k-target"] = c.k_target;
    j["output-prefix"] = c.output_prefix;
    j["timings"] = c.timings;
    return j;
}

inline RunConfig config_from_json(const Json& j) {
    RunConfig c;
    try {
        c.command = j.at("command").get<std::string>();
        c.metric = j.value("metric", std::string{});
        if (j.contains("n"))
            c.n = j.at("n").get<int>();
        c.delta = j.value("delta", c.delta);
        c.s0 = j.value("s0", c.s0);
        c.bump_amplitude = j.value("bump-amplitude", c.bump_amplitude);
        c.bump_period = j.value("bump-period", c.bump_period);
        c.slopes = j.value("slopes", c.slopes);
        c.lambda_max = j.value("lambda-max", c.lambda_max);
        c.resolution = j.value("resolution", c.resolution);
        if (j.contains("degree"))
            c.degree = j.at("degree").get<int>();
        if (j.contains("gaps"))
            c.gaps = j.at("gaps").get<int>();
        c.L = j.value("L", c.L);
        c.N = j.value("N", c.N);
        c.margin = j.value("margin", c.margin);
        if (j.contains("s-lo"))
            c.s_lo = j.at("s-lo").get<double>();
        if (j.contains("s-hi"))
            c.s_hi = j.at("s-hi").get<double>();
        c.grid_points = j.value("grid-points", c.grid_points);
        c.k_target = j.value("k-target", c.k_target);
        c.output_prefix = j.value("output-prefix", c.output_prefix);
        c.timings = j.value("timings", c.timings);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed config echo: ") + e.what());
    }
    return c;
}

/// Flat key = value text accepted by --config.  The command stays on the command line.
inline std::string config_text(const RunConfig& c) {
    std::ostringstream out;
    const Json j = config_json(c);
    for (const auto& [key, value] : j.items()) {
        if (key == "command" || (value.is_array() && value.empty()))
            continue;
        out << key << " = ";
        if (value.is_string()) {
            out << '"' << value.get<std::string>() << '"';
        } else if (value.is_array()) {
            out << '[';
            for (std::size_t i = 0; i < value.size(); ++i)
                out << (i ? ", " : "") << format_real(value[i].get<double>());
            out << ']';
        } else if (value.is_number_float()) {
            out << format_real(value.get<double>());
        } else {
            out << value.dump();
        }
        out << '\n';
    }
    return out.str();
}

/// Fills in command-dependent defaults and checks ranges.  Idempotent.
inline RunConfig normalize(RunConfig c) {
    auto require = [](bool ok, const std::string& msg) {
        if (!ok)
            throw ConfigError(msg);
    };
    require(std::find(kCommands.begin(), kCommands.end(), c.command) != kCommands.end(),
            "unknown command '" + c.command + "'");
    if (c.metric.empty())
        c.metric = c.command == "theorem3" ? "theorem3" : "hyperbolic";
    require(std::find(kMetrics.begin(), kMetrics.end(), c.metric) != kMetrics.end(),
            "unknown metric '" + c.metric + "'");
    require(c.command != "theorem3" || c.metric == "theorem3",
            "the theorem3 command uses the theorem3 metric");

    if (c.metric == "theorem3") {
        require(!c.n || *c.n == 2, "the theorem3 metric is two-dimensional");
        c.n = 2;
        require(std::isfinite(c.delta) && c.delta > 0.0, "delta must be positive");
        require(std::isfinite(c.bump_amplitude), "bump amplitude must be finite");
        require(std::isfinite(c.bump_period) && c.bump_period > 0.0,
                "bump period must be positive");
    } else if (c.metric == "custom-warps") {
        require(!c.slopes.empty(), "custom-warps needs --slopes");
        for (double a : c.slopes)
            require(std::isfinite(a), "slopes must be finite");
        const int n = static_cast<int>(c.slopes.size()) + 1;
        require(!c.n || *c.n == n, "n must equal the number of slopes plus one");
        c.n = n;
    } else {
        if (!c.n)
            c.n = 2;
        require(*c.n >= 2, "dimension n must be at least 2");
    }
    require(c.metric == "custom-warps" || c.slopes.empty(), "--slopes needs custom-warps");

    require(std::isfinite(c.s0), "s0 must be finite");
    require(std::isfinite(c.lambda_max), "lambda-max must be finite");
    require(std::isfinite(c.resolution) && c.resolution > 0.0, "resolution must be positive");
    require(!c.degree || (*c.degree >= 0 && *c.degree <= *c.n),
            "degree must lie in 0..n");
    require(!c.gaps || *c.gaps >= 1, "gaps must be at least 1");
    require(std::isfinite(c.L) && c.L > 0.0, "L must be positive");
    require(c.N >= 16, "N must be at least 16");
    require(std::isfinite(c.margin) && c.margin > 0.0, "margin must be positive");
    require(c.grid_points >= 2, "grid-points must be at least 2");
    require(std::isfinite(c.k_target), "k-target must be finite");
    require(!c.output_prefix.empty(), "output-prefix must not be empty");

    if (c.command == "theorem3" || c.command == "curvature") {
        if (!c.s_lo)
            c.s_lo = c.s0;
        if (!c.s_hi)
            c.s_hi = c.metric == "theorem3" ? c.s0 + 3.0 / c.delta + 10.0 * c.bump_period
                                            : c.s0 + 10.0;
        require(std::isfinite(*c.s_lo) && *c.s_lo >= c.s0, "s-lo must be at least s0");
        require(std::isfinite(*c.s_hi) && *c.s_hi > *c.s_lo, "s-hi must exceed s-lo");
    }
    return c;
}

/// Command-line parser writing into `c`, which must outlive it.
inline std::unique_ptr<CLI::App> make_parser(RunConfig& c) {
    auto owner = std::make_unique<CLI::App>("Essential spectra of Laplacians on torus cusps",
                                            kToolName);
    CLI::App& app = *owner;
    app.set_config("--config", "", "flat key = value file; flags override its values");
    app.add_option("command", c.command, "bands | cusp-spectrum | theorem3 | oracle-audit | curvature")
        ->required()
        ->check(CLI::IsMember(kCommands));
    app.add_option("--metric", c.metric, "hyperbolic | theorem3 | custom-warps");
    app.add_option("--n", c.n, "manifold dimension");
    app.add_option("--delta", c.delta, "theorem3 perturbation size");
    app.add_option("--s0", c.s0, "cusp start");
    app.add_option("--bump-amplitude", c.bump_amplitude, "max of the periodic bump");
    app.add_option("--bump-period", c.bump_period, "period of the bump");
    app.add_option("--slopes", c.slopes, "custom-warps: slope of each affine warp")
        ->delimiter(',');
    app.add_option("--lambda-max", c.lambda_max, "energy cap");
    app.add_option("--resolution", c.resolution, "band scan resolution");
    app.add_option("--degree", c.degree, "form degree p");
    app.add_option("--gaps", c.gaps, "number of gap rows to report");
    app.add_option("--L", c.L, "oracle interval length");
    app.add_option("--N", c.N, "oracle grid points");
    app.add_option("--margin", c.margin, "oracle gap-audit depth");
    app.add_option("--s-lo", c.s_lo, "curvature window start");
    app.add_option("--s-hi", c.s_hi, "curvature window end");
    app.add_option("--grid-points", c.grid_points, "curvature samples");
    app.add_option("--k-target", c.k_target, "curvature pinch reference");
    app.add_option("--output-prefix", c.output_prefix, "prefix of the output files");
    app.add_flag("--timings", c.timings, "add wall-clock timings to the report");
    return owner;
}

/// Parses argv.  Throws CLI::ParseError (help requests included).
inline RunConfig parse_args(int argc, const char* const* argv) {
    RunConfig c;
    make_parser(c)->parse(argc, argv);
    return c;
}

/// Worker count from CUSP_SPECTRA_THREADS, else the available parallelism.
inline int threads_from_env() {
    const char* v = std::getenv(kThreadsEnv);
    if (v == nullptr || *v == '\0')
        return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    char* end = nullptr;
    const long n = std::strtol(v, &end, 10);
    if (*end != '\0' || n < 1 || n > 4096)
        throw ConfigError(std::string(kThreadsEnv) + " must be an integer >= 1");
    return static_cast<int>(n);
}

// ---------------------------------------------------------------- pipelines

inline TorusCuspMetric build_metric(const RunConfig& c) {
    if (c.metric == "theorem3")
        return theorem3_family(c.delta, c.s0, BumpParams{c.bump_amplitude, c.bump_period});
    if (c.metric == "custom-warps") {
        std::vector<WarpProfile> warps;
        for (double a : c.slopes)
            warps.push_back(WarpProfile::affine(c.s0, a));
        return TorusCuspMetric(warps, std::vector<double>(c.slopes.size(), 1.0));
    }
    return TorusCuspMetric::hyperbolic(*c.n, c.s0);
}

inline const char* channel_kind_name(ChannelKind k) {
    return k == ChannelKind::Tangential ? "tangential" : "normal";
}

inline Json boundary_json(const BoundaryCondition& bc) {
    if (const auto* r = std::get_if<Robin>(&bc))
        return Json{{"type", "robin"}, {"beta", r->beta}};
    return Json{{"type", "dirichlet"}};
}

inline Json tail_json(const SchrodingerPotential& W) {
    if (const auto* c = std::get_if<ConstantTail>(&W.tail()))
        return Json{{"type", "constant"}, {"value", c->value}, {"onset", c->onset}};
    if (const auto* p = std::get_if<PeriodicTail>(&W.tail()))
        return Json{{"type", "periodic"}, {"period", p->potential.period()}, {"onset", p->onset}};
    return Json{{"type", "unknown"}};
}

class Stopwatch {
public:
    void mark(const std::string& name) {
        const auto now = std::chrono::steady_clock::now();
        laps_[name] = std::chrono::duration<double>(now - last_).count();
        last_ = now;
    }
    [[nodiscard]] const Json& laps() const { return laps_; }

private:
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
    Json laps_ = Json::object();
};

/// Runs the pipeline selected by `config` (normalized first) and returns the report.
/// Nothing is written to disk.
inline RunReport run(const RunConfig& config, int threads = 1) {
    const RunConfig c = normalize(config);
    FloquetOptions fopts;
    fopts.threads = threads;
    Stopwatch clock;

    RunReport rep;
    rep.json["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
    rep.json["config"] = config_json(c);

    const TorusCuspMetric metric = build_metric(c);
    const int degree = c.degree.value_or(0);

    auto emit_spectrum = [&](const BandStructure& bs) {
        const std::size_t rows = gap_rows(bs, c);
        rep.bands_csv = bands_csv(bs);
        rep.gaps_csv = gaps_csv(bs, rows);
        rep.json["spectrum"] = spectrum_json(bs, rows);
    };
    auto require_gap_rows = [&](const BandStructure& bs) {
        if (c.gaps && bs.gaps.size() < static_cast<std::size_t>(*c.gaps))
            throw NumericalError("requested " + std::to_string(*c.gaps) + " gaps but only " +
                                 std::to_string(bs.gaps.size()) + " lie below lambda_max = " +
                                 format_real(c.lambda_max));
    };

    if (c.command == "bands") {
        const auto bs = p_form_essential_spectrum(metric, degree, c.lambda_max, c.resolution, fopts);
        clock.mark("spectrum");
        rep.json["degree"] = degree;
        require_gap_rows(bs);
        emit_spectrum(bs);
    } else if (c.command == "cusp-spectrum") {
        std::vector<BandStructure> parts;
        Json per_degree = Json::array();
        const int lo = c.degree ? *c.degree : 0;
        const int hi = c.degree ? *c.degree : *c.n;
        for (int p = lo; p <= hi; ++p) {
            Json channels = Json::array();
            std::vector<BandStructure> chan_parts;
            for (const auto& ch : channels_for_degree(metric, p)) {
                auto bs = essential_spectrum_halfline(ch.potential, c.lambda_max, c.resolution,
                                                      fopts);
                channels.push_back(
                    {{"multi_index", ch.multi_index},
                     {"kind", channel_kind_name(ch.kind)},
                     {"boundary", boundary_json(ch.potential.boundary())},
                     {"tail", tail_json(ch.potential)},
                     {"threshold", bs.bands.empty() ? Json(nullptr) : Json(bs.bands.front().lower)}});
                chan_parts.push_back(std::move(bs));
            }
            const auto merged = merge_band_structures(chan_parts, c.lambda_max, c.resolution);
            per_degree.push_back({{"degree", p},
                                  {"channels", channels},
                                  {"spectrum", spectrum_json(merged, merged.gaps.size())}});
            parts.push_back(merged);
        }
        clock.mark("spectrum");
        rep.json["degrees"] = per_degree;
        const auto all = merge_band_structures(parts, c.lambda_max, c.resolution);
        require_gap_rows(all);
        emit_spectrum(all);
    } else if (c.command == "theorem3") {
        const auto bs = p_form_essential_spectrum(metric, degree, c.lambda_max, c.resolution, fopts);
        clock.mark("spectrum");
        require_gap_rows(bs);
        emit_spectrum(bs);
        rep.json["degree"] = degree;
        rep.json["tail_onset"] = cutoff_tail_onset(c.delta, c.s0);
        const auto samples = curvature_samples(metric, *c.s_lo, *c.s_hi, c.grid_points);
        const auto report = curvature_range(metric, *c.s_lo, *c.s_hi, c.grid_points, c.k_target);
        clock.mark("curvature");
        rep.curvature_csv = curvature_csv(samples);
        rep.json["curvature"] = curvature_json(report, *c.s_lo, *c.s_hi);
        rep.json["curvature"]["pinch_bound"] =
            pinch_bound(c.delta, BumpParams{c.bump_amplitude, c.bump_period});
    } else if (c.command == "oracle-audit") {
        const auto bs = p_form_essential_spectrum(metric, degree, c.lambda_max, c.resolution, fopts);
        clock.mark("spectrum");
        require_gap_rows(bs);
        emit_spectrum(bs);
        std::vector<double> eigs;
        const Grid grid(c.s0, c.L, c.N);
        for (const auto& ch : channels_for_degree(metric, degree)) {
            const auto e = eigenvalues_below(discretize_schrodinger(ch.potential, grid), c.lambda_max);
            eigs.insert(eigs.end(), e.begin(), e.end());
        }
        std::sort(eigs.begin(), eigs.end());
        clock.mark("oracle");
        const auto contained = band_containment(eigs, bs, c.resolution);
        const auto audit = gap_audit(eigs, bs, c.margin);
        Json per_gap = Json::array();
        for (const auto& g : audit.gaps)
            per_gap.push_back({{"index", g.gap_index},
                               {"lower", g.lower},
                               {"upper", g.upper},
                               {"count", g.count}});
        rep.json["degree"] = degree;
        rep.json["oracle_audit"] = {{"L", c.L},
                                    {"N", c.N},
                                    {"eigenvalue_count", eigs.size()},
                                    {"within_resolution", contained.within},
                                    {"fraction_within", contained.fraction()},
                                    {"margin", c.margin},
                                    {"below_spectrum", audit.below_spectrum},
                                    {"max_gap_count", audit.max_count()},
                                    {"gaps", per_gap},
                                    {"eigenvalues", eigs}};
    } else { // curvature
        const auto samples = curvature_samples(metric, *c.s_lo, *c.s_hi, c.grid_points);
        const auto report = curvature_range(metric, *c.s_lo, *c.s_hi, c.grid_points, c.k_target);
        clock.mark("curvature");
        rep.curvature_csv = curvature_csv(samples);
        rep.json["curvature"] = curvature_json(report, *c.s_lo, *c.s_hi);
        if (c.metric == "theorem3") {
            rep.json["curvature"]["pinch_bound"] =
                pinch_bound(c.delta, BumpParams{c.bump_amplitude, c.bump_period});
            rep.json["tail_onset"] = cutoff_tail_onset(c.delta, c.s0);
        }
    }
    if (c.timings)
        rep.json["timings"] = clock.laps();
    return rep;
}

// ---------------------------------------------------------------- files

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw ConfigError("cannot open " + path + " for writing");
    f << content;
    if (!f)
        throw ConfigError("failed writing " + path);
}

/// Writes <prefix>.report.json and whichever CSV tables the run produced.
inline std::vector<std::string> write_outputs(const RunReport& rep, const std::string& prefix) {
    std::vector<std::string> written;
    auto put = [&](const std::string& suffix, const std::string& content) {
        write_file(prefix + suffix, content);
        written.push_back(prefix + suffix);
    };
    if (rep.bands_csv)
        put(".bands.csv", *rep.bands_csv);
    if (rep.gaps_csv)
        put(".gaps.csv", *rep.gaps_csv);
    if (rep.curvature_csv)
        put(".curvature.csv", *rep.curvature_csv);
    put(".report.json", rep.json.dump(2) + "\n");
    return written;
}

// ---------------------------------------------------------------- entry point

inline int emit_error(std::ostream& err, int code, const std::string& type, const std::string& kind,
                      const std::string& message, Json extra = Json::object()) {
    Json j{{"error", {{"type", type}, {"kind", kind}, {"message", message}, {"exit_code", code}}}};
    for (const auto& [k, v] : extra.items())
        j["error"][k] = v;
    err << j.dump() << '\n';
    return code;
}

/// Whole program: 0 success, 2 configuration error, 3 numerical failure.
inline int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    const auto parser = make_parser(cfg);
    try {
        parser->parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << parser->help();
        return 0;
    } catch (const CLI::ParseError& e) {
        return emit_error(err, 2, "config", "parse", e.what());
    }
    try {
        const int threads = threads_from_env();
        const RunReport rep = run(cfg, threads);
        for (const auto& path : write_outputs(rep, normalize(cfg).output_prefix))
            out << path << '\n';
        return 0;
    } catch (const ConfigError& e) {
        return emit_error(err, 2, "config", "invalid", e.what());
    } catch (const DomainError& e) {
        return emit_error(err, 2, "config", "domain", e.what());
    } catch (const UnsupportedError& e) {
        return emit_error(err, 2, "config", "unsupported", e.what());
    } catch (const RefinementError& e) {
        return emit_error(err, 3, "numerical", "refinement", e.what());
    } catch (const NumericalError& e) {
        return emit_error(err, 3, "numerical", "numerical", e.what());
    } catch (const ClassificationError& e) {
        return emit_error(err, 3, "numerical", "classification", e.what(),
                          Json{{"max_deviation", e.max_deviation()}});
    } catch (const std::exception& e) {
        return emit_error(err, 3, "numerical", "internal", e.what());
    }
}

} // namespace cusp::app
