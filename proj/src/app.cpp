#include "spp/app.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "spp/scan_io.hpp"

namespace spp::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void rethrow_with_stage(const Error& e, const std::string& stage) {
    const std::string what = stage + ": " + e.what();
    switch (e.kind()) {
    case ErrorKind::domain: throw DomainError(what);
    case ErrorKind::range: throw RangeError(what);
    case ErrorKind::insufficient_data: throw InsufficientDataError(what);
    case ErrorKind::degenerate_model: throw DegenerateModelError(what);
    case ErrorKind::fit_failure: throw FitFailure(what);
    case ErrorKind::validation:
        throw ValidationError(static_cast<const ValidationError&>(e).field(), stage + ": " +
                                                                                   e.what());
    case ErrorKind::io: throw IoError(what);
    }
    throw Error(e.kind(), what);
}

template <class F>
auto staged(const std::string& stage, F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        rethrow_with_stage(e, stage);
    }
}

std::string safe_name(const std::string& label) {
    std::string out = label;
    for (char& c : out) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.';
        if (!ok) {
            c = '_';
        }
    }
    return out;
}

std::string scan_file(const char* kind, Regime r, const WaveguideSpec& wg) {
    return std::string(kind) + "_" + std::string(to_string(r)) + "_" + safe_name(wg.label) + ".csv";
}

// Manifests keep the knowns exact since the fit reads them back; result
// records round them like every other reported float.
json known_json(const FringeKnowns& k, bool exact = false) {
    const auto num = [exact](double v) { return exact ? json(v) : json_number(v); };
    return json{{"R", num(k.reflectance)}, {"T", num(k.transmittance)}, {"g1p", num(k.g1p)},
                {"g2p", num(k.g2p)},       {"gt1", num(k.gt1)}};
}

FringeKnowns known_from_json(const json& j) {
    FringeKnowns k;
    k.reflectance = j.at("R").get<double>();
    k.transmittance = j.at("T").get<double>();
    k.g1p = j.at("g1p").get<double>();
    k.g2p = j.at("g2p").get<double>();
    k.gt1 = j.at("gt1").get<double>();
    return k;
}

std::vector<double> waveguide_lengths(const RegimeConfig& rc) {
    std::vector<double> lengths;
    for (const WaveguideSpec& w : rc.waveguides) {
        lengths.push_back(w.length);
    }
    return lengths;
}

FringeTruth fringe_truth(const ExperimentConfig& config, Regime r) {
    const RegimeConfig& rc = config.regime(r);
    FringeTruth t;
    t.channel = config.truth(r);
    t.gamma_int = rc.gamma_int;
    t.reflectance = rc.fringe.reflectance;
    t.transmittance = rc.fringe.transmittance;
    t.g2p = rc.fringe.gamma2_prime;
    t.k_spp = rc.fringe.k_spp_per_um * 1e6;
    return t;
}

// Input intensity that puts the fringe maximum at the configured peak counts.
double input_intensity(const FringeTruth& truth, double length, double peak_counts) {
    const FringeTerms terms = fringe_terms(fringe_model(truth, length));
    const double p_max = terms.offset + terms.amplitude;
    if (!(p_max > 0.0)) {
        throw DegenerateModelError("fringe model has no signal at length " +
                                   std::to_string(length * 1e6) + " um");
    }
    return peak_counts / p_max;
}

FringeScan simulate_waveguide_fringe(const ExperimentConfig& config, Regime r,
                                     const WaveguideSpec& wg, std::optional<double> assumed_gt1) {
    const RegimeConfig& rc = config.regime(r);
    FringeTruth truth = fringe_truth(config, r);
    truth.assumed_gt1 = assumed_gt1;
    const StageGeometry geom{rc.fringe.stage_scale, config.lambda0_nm * 1e-9};
    const std::vector<double> positions = rc.fringe.grid.positions();
    const double amplitude = input_intensity(truth, wg.length, rc.fringe.peak_counts);
    return simulate_fringe_scan(truth, wg, positions, geom, amplitude, r, config.seed,
                                config.noise);
}

DecayScan simulate_regime_decay(const ExperimentConfig& config, Regime r) {
    const RegimeConfig& rc = config.regime(r);
    const std::vector<double> lengths = waveguide_lengths(rc);
    return simulate_decay_scan(config.truth(r), lengths, rc.decay.base_rate_cps,
                               rc.decay.integration_s, r, config.seed, config.noise);
}

G2Result g2_result(const G2Settings& settings, const G2Counts& counts) {
    G2Result g;
    g.counts = counts;
    g.g2 = estimate_g2(counts);
    g.model_g2 = expected_g2(settings.source);
    g.expect = settings.expect;
    g.tolerance = settings.tolerance;
    return g;
}

void measured_pair(const char* key, const Measured& m, json& into) {
    into[key] = json_number(m.value);
    into[std::string(key) + "_std"] = json_number(m.std);
}

json waveguide_json(const WaveguideResult& w) {
    json j{{"label", w.waveguide.label},
           {"length_um", json_number(w.waveguide.length * 1e6)},
           {"known", known_json(w.known)}};
    measured_pair("gamma_eff", w.gamma_eff, j);
    measured_pair("gamma_eff_fit", w.direct.gamma_eff, j);
    j["delta"] = json_number(w.direct.delta);
    j["scale"] = json_number(w.direct.scale);
    j["I_in"] = json_number(w.direct.i_in);
    j["chi2"] = json_number(w.direct.goodness);
    j["at_boundary"] = w.direct.at_boundary;
    j["mc_instances"] = w.monte_carlo.instances.size();
    j["mc_failures"] = w.monte_carlo.failures;
    j["mc_std"] = w.monte_carlo.std ? json_number(*w.monte_carlo.std) : json(nullptr);
    json windows = json::array();
    for (double g : w.windows.gamma_eff) {
        windows.push_back(json_number(g));
    }
    j["window_gamma_eff"] = windows;
    j["window_std"] = w.windows.std ? json_number(*w.windows.std) : json(nullptr);
    j["visibility_empirical"] = json_number(w.empirical_visibility);
    return j;
}

json regime_json(const RegimeResult& r, bool with_checks) {
    json j = json::object();
    if (r.decay) {
        j["decay"] = to_json(*r.decay);
    }
    json wgs = json::array();
    for (const WaveguideResult& w : r.waveguides) {
        wgs.push_back(waveguide_json(w));
    }
    j["waveguides"] = wgs;
    if (r.line) {
        j["line"] = to_json(*r.line);
        j["slope_clamped_to_zero"] = r.slope_clamped;
    }
    if (r.summary) {
        j["summary"] = to_json(*r.summary);
        j["t2_at_bound"] = r.t2_at_bound;
    }
    if (with_checks) {
        json checks = json::object();
        for (const Check& c : r.checks) {
            checks[c.name] = json{{"value", json_number(c.value)},
                                  {"expected", json_number(c.expected)},
                                  {"tolerance", json_number(c.tolerance)},
                                  {"pass", c.pass}};
        }
        j["checks"] = checks;
        j["pass"] = r.pass();
    }
    return j;
}

json g2_json(const G2Result& g) {
    json j{{"n_herald", g.counts.n_herald}, {"n_ab", g.counts.n_ab},
           {"n_ac", g.counts.n_ac},         {"n_abc", g.counts.n_abc},
           {"window_ns", json_number(g.counts.window * 1e9)},
           {"g2", json_number(g.g2)},       {"model_g2", json_number(g.model_g2)}};
    if (g.expect) {
        j["expect"] = json_number(*g.expect);
        j["tolerance"] = json_number(g.tolerance);
        j["pass"] = g.pass();
    }
    return j;
}

json dispersion_json(const DispersionResult& d) {
    return json{{"gvd_s_per_m_rad", json_number(d.gvd)},
                {"sigma_omega_rad_s", json_number(d.check.sigma_omega)},
                {"sigma_t0_s", json_number(d.check.sigma_t0)},
                {"sigma_t_s", json_number(d.check.sigma_t)},
                {"overlap", json_number(d.check.overlap)},
                {"min_overlap", json_number(d.min_overlap)},
                {"pass", d.pass()}};
}

Check make_check(std::string name, double value, double expected, double tolerance) {
    return Check{std::move(name), value, expected, tolerance,
                 std::abs(value - expected) <= tolerance};
}

}  // namespace

int exit_code_for(const Error& error) {
    switch (error.kind()) {
    case ErrorKind::io: return exit_io;
    case ErrorKind::fit_failure:
    case ErrorKind::insufficient_data: return exit_fit_failure;
    case ErrorKind::validation:
    case ErrorKind::domain:
    case ErrorKind::range:
    case ErrorKind::degenerate_model: return exit_validation;
    }
    return exit_validation;
}

SimKind sim_kind_from_string(std::string_view text) {
    if (text == "decay") return SimKind::decay;
    if (text == "fringe") return SimKind::fringe;
    if (text == "g2") return SimKind::g2;
    throw ValidationError("kind", "must be decay, fringe or g2");
}

bool RegimeResult::pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

bool G2Result::pass() const {
    return !expect || std::abs(g2 - *expect) <= tolerance;
}

const RegimeResult& ReportRecord::regime(Regime r) const {
    for (const RegimeResult& rr : regimes) {
        if (rr.regime == r) {
            return rr;
        }
    }
    throw DomainError("report has no " + std::string(to_string(r)) + " regime");
}

bool ReportRecord::pass() const {
    const bool regimes_ok = std::all_of(regimes.begin(), regimes.end(),
                                        [](const RegimeResult& r) { return r.pass(); });
    return regimes_ok && (!dispersion || dispersion->pass()) && (!g2 || g2->pass());
}

json ReportRecord::to_json() const {
    json j{{"config_hash", config_hash}, {"seed", seed}};
    json rs = json::object();
    for (const RegimeResult& r : regimes) {
        rs[std::string(spp::to_string(r.regime))] = regime_json(r, true);
    }
    j["regimes"] = rs;
    j["dispersion"] = dispersion ? dispersion_json(*dispersion) : json(nullptr);
    j["g2"] = g2 ? g2_json(*g2) : json(nullptr);
    j["pass"] = pass();
    return j;
}

// ---------------------------------------------------------------------------
// simulate

SimulateOutput run_simulate(const ExperimentConfig& config, SimKind kind, const fs::path& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
    }

    SimulateOutput out;
    json entries = json::array();
    const auto record = [&](const std::string& name, json entry) {
        out.files.push_back(out_dir / name);
        entry["path"] = name;
        entries.push_back(std::move(entry));
    };

    const char* kind_name = "decay";
    if (kind == SimKind::decay) {
        for (Regime r : config.selected) {
            const RegimeConfig& rc = config.regime(r);
            const DecayScan scan = staged("simulate decay", [&] {
                return simulate_regime_decay(config, r);
            });
            for (std::size_t i = 0; i < rc.waveguides.size(); ++i) {
                const WaveguideSpec& wg = rc.waveguides[i];
                const std::string name = scan_file("decay", r, wg);
                DecayScan one{r, {scan.points[i]}};
                write_decay_csv(out_dir / name, one);
                record(name, json{{"kind", "decay"},
                                  {"regime", std::string(to_string(r))},
                                  {"label", wg.label},
                                  {"length_um", json_number(wg.length * 1e6)}});
            }
        }
    } else if (kind == SimKind::fringe) {
        kind_name = "fringe";
        for (Regime r : config.selected) {
            const RegimeConfig& rc = config.regime(r);
            for (const WaveguideSpec& wg : rc.waveguides) {
                const FringeScan scan = staged("simulate fringe " + wg.label, [&] {
                    return simulate_waveguide_fringe(config, r, wg, std::nullopt);
                });
                const std::string name = scan_file("fringe", r, wg);
                write_fringe_csv(out_dir / name, scan);
                record(name, json{{"kind", "fringe"},
                                  {"regime", std::string(to_string(r))},
                                  {"label", wg.label},
                                  {"length_um", json_number(wg.length * 1e6)},
                                  {"known", known_json(scan.known, true)},
                                  {"lambda0_nm", config.lambda0_nm},
                                  {"stage_scale", rc.fringe.stage_scale},
                                  {"mc_instances", rc.monte_carlo_instances}});
            }
        }
    } else {
        kind_name = "g2";
        if (!config.g2) {
            throw ValidationError("g2", "missing section required for kind=g2");
        }
        const G2Counts counts = staged("simulate g2", [&] {
            return simulate_g2_counts(config.g2->source, config.g2->duration_s, config.seed);
        });
        write_g2_csv(out_dir / "g2.csv", counts);
        record("g2.csv", json{{"kind", "g2"}});
    }

    out.manifest = json{{"config_hash", config.hash},
                        {"seed", config.seed},
                        {"kind", kind_name},
                        {"group_velocity_m_s", config.group_velocity_m_s},
                        {"config", config.effective},
                        {"files", entries}};
    out.manifest_path = out_dir / (std::string("manifest_") + kind_name + ".json");
    write_text_file(out.manifest_path, out.manifest.dump(2) + "\n");
    return out;
}

// ---------------------------------------------------------------------------
// analysis

WaveguideResult analyse_fringe(const FringeScan& scan, std::size_t mc_instances,
                               std::uint64_t seed, double stage_scale) {
    const std::string stage = "fringe fit " + scan.waveguide.label;
    FringeFitOptions options;
    options.initial_scale = stage_scale;

    WaveguideResult w;
    w.waveguide = scan.waveguide;
    w.known = scan.known;
    w.direct = staged(stage, [&] { return fit_fringe(scan, options); });
    w.monte_carlo = staged(stage + " (monte carlo)", [&] {
        return monte_carlo_fringe(scan, mc_instances, seed, 0, options);
    });
    w.windows = fit_fringe_windows(scan, w.direct.scale);
    w.empirical_visibility = empirical_visibility(scan, w.direct.scale);
    const double mc_std = w.monte_carlo.std.value_or(0.0);
    w.gamma_eff = {w.monte_carlo.mean, mc_std > 0.0 ? mc_std : w.direct.gamma_eff.std};
    return w;
}

void finish_regime(RegimeResult& result, double group_velocity, const Expectations* expect) {
    if (result.waveguides.size() >= 2) {
        std::vector<LinePoint> points;
        for (const WaveguideResult& w : result.waveguides) {
            if (!(w.gamma_eff.std > 0.0)) {
                throw FitFailure("line fit: Gamma_eff of waveguide '" + w.waveguide.label +
                                 "' has no spread to weight it by");
            }
            points.push_back({w.waveguide.length, w.gamma_eff.value, w.gamma_eff.std});
        }
        result.line = fit_gamma_eff_line(points);
    }
    if (result.line && result.decay) {
        Measured slope = result.line->slope;
        // Noise can push the slope of a damping-free waveguide below zero.
        if (slope.value < 0.0) {
            slope.value = 0.0;
            result.slope_clamped = true;
        }
        result.summary = summarize(result.decay->gamma1, slope, group_velocity, result.regime);
        result.t2_at_bound = result.summary->gamma2_star.value == 0.0;
    }
    if (expect == nullptr) {
        return;
    }
    if (expect->l_um && result.decay) {
        result.checks.push_back(make_check("L_um", result.decay->propagation_length.value * 1e6,
                                           *expect->l_um, expect->l_rel_tol * *expect->l_um));
    }
    if (expect->slope_per_um && result.line) {
        result.checks.push_back(make_check("slope_per_um", result.line->slope.value * 1e-6,
                                           *expect->slope_per_um,
                                           expect->slope_std_multiple *
                                               result.line->slope.std * 1e-6));
    }
    if (expect->t2_s && result.summary) {
        result.checks.push_back(make_check("T2_s", result.summary->t2.value, *expect->t2_s,
                                           expect->t2_rel_tol * *expect->t2_s));
    }
}

DispersionResult run_dispersion_check(const DispersionSettings& settings, double lambda0_nm) {
    const double lambda0 = lambda0_nm * 1e-9;
    const DispersionTable table =
        load_dispersion_table(settings.table_csv, omega_from_wavelength(lambda0));
    DispersionResult d;
    d.gvd = gvd_coefficient(table);
    d.check = dispersion_overlap(settings.fwhm_nm * 1e-9, lambda0, settings.length_um * 1e-6, d.gvd);
    d.min_overlap = settings.min_overlap;
    return d;
}

// ---------------------------------------------------------------------------
// pipeline

ReportRecord run_pipeline(const ExperimentConfig& config, const std::optional<fs::path>& out_dir) {
    if (out_dir) {
        std::error_code ec;
        fs::create_directories(*out_dir, ec);
        if (ec) {
            throw IoError("cannot create " + out_dir->string() + ": " + ec.message());
        }
    }

    ReportRecord report;
    report.config_hash = config.hash;
    report.seed = config.seed;

    for (Regime r : config.selected) {
        const RegimeConfig& rc = config.regime(r);
        const std::string name(to_string(r));
        RegimeResult result;
        result.regime = r;

        const DecayScan decay =
            staged(name + " decay simulation", [&] { return simulate_regime_decay(config, r); });
        result.decay = staged(name + " decay fit", [&] {
            return fit_exponential_decay(decay, config.group_velocity_m_s);
        });
        if (out_dir) {
            write_decay_csv(*out_dir / ("decay_" + name + ".csv"), decay);
        }

        const double l_fit = result.decay->propagation_length.value;
        for (const WaveguideSpec& wg : rc.waveguides) {
            const FringeScan scan = staged(name + " fringe simulation " + wg.label, [&] {
                return simulate_waveguide_fringe(config, r, wg, wg.length / l_fit);
            });
            if (out_dir) {
                write_fringe_csv(*out_dir / scan_file("fringe", r, wg), scan);
            }
            result.waveguides.push_back(staged(name, [&] {
                return analyse_fringe(scan, rc.monte_carlo_instances, config.seed,
                                      rc.fringe.stage_scale);
            }));
        }
        staged(name, [&] {
            finish_regime(result, config.group_velocity_m_s, &rc.expect);
            return 0;
        });
        report.regimes.push_back(std::move(result));
    }

    if (config.dispersion) {
        report.dispersion = staged("dispersion check", [&] {
            return run_dispersion_check(*config.dispersion, config.lambda0_nm);
        });
    }
    if (config.g2) {
        report.g2 = staged("g2 check", [&] {
            const G2Counts counts =
                simulate_g2_counts(config.g2->source, config.g2->duration_s, config.seed);
            return g2_result(*config.g2, counts);
        });
        if (out_dir) {
            write_g2_csv(*out_dir / "g2.csv", report.g2->counts);
        }
    }

    if (out_dir) {
        write_text_file(*out_dir / "report.json", report.to_json().dump(2) + "\n");
    }
    return report;
}

// ---------------------------------------------------------------------------
// fit

json run_fit(std::span<const fs::path> manifests) {
    std::map<Regime, DecayScan> decays;
    std::map<Regime, std::vector<WaveguideResult>> fringes;
    std::optional<G2Result> g2;
    std::optional<double> group_velocity;
    json hashes = json::array();
    json seeds = json::array();

    for (const fs::path& path : manifests) {
        const json manifest = read_json_file(path);
        const fs::path dir = path.parent_path();
        try {
            hashes.push_back(manifest.at("config_hash"));
            const std::uint64_t seed = manifest.at("seed").get<std::uint64_t>();
            seeds.push_back(seed);
            group_velocity = manifest.at("group_velocity_m_s").get<double>();
            for (const json& entry : manifest.at("files")) {
                const std::string kind = entry.at("kind").get<std::string>();
                const fs::path file = dir / entry.at("path").get<std::string>();
                if (kind == "g2") {
                    G2Settings settings;
                    if (manifest.contains("config") && manifest["config"].contains("g2")) {
                        settings = *parse_config(manifest["config"]).g2;
                    }
                    g2 = g2_result(settings, read_g2_csv(file));
                    continue;
                }
                const Regime r = regime_from_string(entry.at("regime").get<std::string>());
                if (kind == "decay") {
                    DecayScan scan = read_decay_csv(file, r);
                    DecayScan& acc = decays[r];
                    acc.regime = r;
                    acc.points.insert(acc.points.end(), scan.points.begin(), scan.points.end());
                } else if (kind == "fringe") {
                    FringeScan scan;
                    scan.waveguide = {entry.at("length_um").get<double>() * 1e-6,
                                      entry.at("label").get<std::string>()};
                    scan.regime = r;
                    scan.wavelength = entry.at("lambda0_nm").get<double>() * 1e-9;
                    scan.known = known_from_json(entry.at("known"));
                    scan.points = read_fringe_csv(file);
                    fringes[r].push_back(analyse_fringe(
                        scan, entry.value("mc_instances", std::size_t{200}), seed,
                        entry.value("stage_scale", 1.0)));
                } else {
                    throw IoError(path.string() + ": unknown file kind '" + kind + "'");
                }
            }
        } catch (const json::exception& e) {
            throw IoError(path.string() + ": malformed manifest (" + e.what() + ")");
        }
    }

    json out{{"config_hash", hashes}, {"seed", seeds}};
    json rs = json::object();
    for (Regime r : {Regime::classical, Regime::quantum}) {
        if (!decays.contains(r) && !fringes.contains(r)) {
            continue;
        }
        RegimeResult result;
        result.regime = r;
        if (decays.contains(r)) {
            std::sort(decays[r].points.begin(), decays[r].points.end(),
                      [](const DecayPoint& a, const DecayPoint& b) { return a.length < b.length; });
            result.decay = staged(std::string(to_string(r)) + " decay fit", [&] {
                return fit_exponential_decay(decays[r], group_velocity.value_or(0.0));
            });
        }
        if (fringes.contains(r)) {
            result.waveguides = fringes[r];
        }
        finish_regime(result, group_velocity.value_or(0.0), nullptr);
        rs[std::string(to_string(r))] = regime_json(result, false);
    }
    out["regimes"] = rs;
    out["g2"] = g2 ? g2_json(*g2) : json(nullptr);
    return out;
}

// ---------------------------------------------------------------------------
// report

json merge_results(std::span<const fs::path> files) {
    json merged{{"regimes", json::object()}};
    for (const fs::path& path : files) {
        const json doc = read_json_file(path);
        if (!doc.is_object() || !doc.contains("regimes") || !doc["regimes"].is_object()) {
            throw IoError(path.string() + ":1: not a report or fit result (no \"regimes\" object)");
        }
        for (const auto& [name, section] : doc["regimes"].items()) {
            merged["regimes"][name] = section;
        }
        for (const char* key : {"dispersion", "g2"}) {
            if (doc.contains(key) && !doc[key].is_null()) {
                merged[key] = doc[key];
            }
        }
    }
    return merged;
}

namespace {

std::string format_cell(const json& value, const json& std) {
    if (!value.is_number()) {
        return "inf";
    }
    const double v = value.get<double>();
    const double e = std.is_number() ? std.get<double>() : 0.0;
    const double ref = v != 0.0 ? std::abs(v) : std::abs(e);
    const int exponent = ref > 0.0 ? static_cast<int>(std::floor(std::log10(ref))) : 0;
    const double scale = std::pow(10.0, exponent);
    char buf[64];
    if (std.is_number()) {
        std::snprintf(buf, sizeof buf, "%.2f +/- %.2f x10^%d", v / scale, e / scale, exponent);
    } else {
        std::snprintf(buf, sizeof buf, "%.2f x10^%d", v / scale, exponent);
    }
    return buf;
}

}  // namespace

std::string render_report(const json& merged) {
    struct Row {
        const char* label;
        const char* key;
    };
    static constexpr Row rows[] = {
        {"Gamma1 (1/s)", "gamma1_s"},  {"Gamma2* (1/s)", "gamma2_star_s"},
        {"Gamma2 (1/s)", "gamma2_s"},  {"T1 (s)", "T1_s"},
        {"T2* (s)", "T2_star_s"},      {"T2 (s)", "T2_s"},
    };

    std::vector<std::pair<std::string, const json*>> columns;
    const json& regimes = merged.at("regimes");
    for (const char* name : {"classical", "quantum"}) {
        if (regimes.contains(name) && regimes[name].contains("summary")) {
            columns.emplace_back(name, &regimes[name]["summary"]);
        }
    }
    if (columns.empty()) {
        throw IoError("report: no regime with a decoherence summary");
    }

    std::ostringstream out;
    char buf[128];
    std::snprintf(buf, sizeof buf, "%-16s", "");
    out << buf;
    for (const auto& [name, summary] : columns) {
        std::string title = name;
        title[0] = static_cast<char>(title[0] - 'a' + 'A');
        std::snprintf(buf, sizeof buf, "%-28s", title.c_str());
        out << buf;
    }
    out << '\n';
    for (const Row& row : rows) {
        std::snprintf(buf, sizeof buf, "%-16s", row.label);
        out << buf;
        for (const auto& [name, summary] : columns) {
            const json value = summary->value(row.key, json(nullptr));
            const json std = summary->value(std::string(row.key) + "_std", json(nullptr));
            std::snprintf(buf, sizeof buf, "%-28s", format_cell(value, std).c_str());
            out << buf;
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace spp::cli
