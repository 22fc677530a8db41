#include "spp/config.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "spp/error.hpp"

namespace spp {

using nlohmann::json;

namespace {

// Walks a JSON object, tracking the dotted path for error messages.
class Section {
public:
    Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) {
            throw ValidationError(path_.empty() ? "<root>" : path_, "must be an object");
        }
    }

    std::string path_of(const std::string& key) const {
        return path_.empty() ? key : path_ + "." + key;
    }

    bool has(const std::string& key) const { return node_.contains(key); }

    const json& raw(const std::string& key) const {
        if (!node_.contains(key)) {
            throw ValidationError(path_of(key), "missing required field");
        }
        return node_.at(key);
    }

    Section child(const std::string& key) const { return Section(raw(key), path_of(key)); }

    double number(const std::string& key) const {
        const json& v = raw(key);
        if (!v.is_number()) {
            throw ValidationError(path_of(key), "must be a number");
        }
        return v.get<double>();
    }

    double number_or(const std::string& key, double fallback) const {
        return has(key) ? number(key) : fallback;
    }

    double positive(const std::string& key) const {
        const double v = number(key);
        if (!(v > 0.0)) {
            throw ValidationError(path_of(key), "must be positive");
        }
        return v;
    }

    double positive_or(const std::string& key, double fallback) const {
        return has(key) ? positive(key) : fallback;
    }

    double non_negative_or(const std::string& key, double fallback) const {
        if (!has(key)) {
            return fallback;
        }
        const double v = number(key);
        if (!(v >= 0.0)) {
            throw ValidationError(path_of(key), "must be non-negative");
        }
        return v;
    }

    double probability_or(const std::string& key, double fallback) const {
        const double v = non_negative_or(key, fallback);
        if (v > 1.0) {
            throw ValidationError(path_of(key), "must lie in [0, 1]");
        }
        return v;
    }

    std::uint64_t unsigned_integer(const std::string& key) const {
        const json& v = raw(key);
        // Built in code, a non-negative integer can be stored as signed.
        if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
            throw ValidationError(path_of(key), "must be a non-negative integer");
        }
        return v.get<std::uint64_t>();
    }

    std::string text(const std::string& key) const {
        const json& v = raw(key);
        if (!v.is_string()) {
            throw ValidationError(path_of(key), "must be a string");
        }
        return v.get<std::string>();
    }

    const json& node() const { return node_; }
    const std::string& path() const { return path_; }

private:
    const json& node_;
    std::string path_;
};

Expectations parse_expect(const Section& s) {
    Expectations e;
    if (s.has("L_um")) {
        e.l_um = s.positive("L_um");
    }
    e.l_rel_tol = s.positive_or("L_rel_tol", e.l_rel_tol);
    if (s.has("slope_per_um")) {
        e.slope_per_um = s.number("slope_per_um");
    }
    e.slope_std_multiple = s.positive_or("slope_std_multiple", e.slope_std_multiple);
    if (s.has("T2_s")) {
        e.t2_s = s.positive("T2_s");
    }
    e.t2_rel_tol = s.positive_or("T2_rel_tol", e.t2_rel_tol);
    return e;
}

RegimeConfig parse_regime(const Section& s, Regime regime) {
    RegimeConfig rc;
    rc.regime = regime;

    const Section truth = s.child("truth");
    rc.gamma1_per_s = truth.positive("gamma1_per_s");
    rc.gamma2_star_per_s = truth.non_negative_or("gamma2_star_per_s", 0.0);
    rc.gamma_int = truth.non_negative_or("gamma_int", 0.0);

    const json& wgs = s.raw("waveguides");
    if (!wgs.is_array() || wgs.empty()) {
        throw ValidationError(s.path_of("waveguides"), "must be a non-empty array");
    }
    for (std::size_t i = 0; i < wgs.size(); ++i) {
        const Section w(wgs[i], s.path_of("waveguides") + "[" + std::to_string(i) + "]");
        WaveguideSpec spec;
        spec.length = w.positive("length_um") * 1e-6;
        spec.label = w.has("label") ? w.text("label") : "wg" + std::to_string(i + 1);
        for (const WaveguideSpec& prev : rc.waveguides) {
            if (prev.label == spec.label) {
                throw ValidationError(w.path_of("label"), "duplicate waveguide label");
            }
            if (prev.length == spec.length) {
                throw ValidationError(w.path_of("length_um"), "duplicate waveguide length");
            }
        }
        rc.waveguides.push_back(spec);
    }

    const Section decay = s.child("decay");
    rc.decay.base_rate_cps = decay.positive("base_rate_cps");
    rc.decay.integration_s = decay.positive("integration_s");

    const Section fringe = s.child("fringe");
    rc.fringe.peak_counts = fringe.positive("peak_counts");
    rc.fringe.reflectance = fringe.probability_or("reflectance", 0.5);
    rc.fringe.transmittance = fringe.probability_or("transmittance", 0.5);
    if (rc.fringe.reflectance + rc.fringe.transmittance > 1.0 + 1e-12) {
        throw ValidationError(fringe.path_of("transmittance"),
                              "reflectance + transmittance must not exceed 1");
    }
    rc.fringe.gamma2_prime = fringe.non_negative_or("gamma2_prime", 0.0);
    rc.fringe.k_spp_per_um = fringe.number_or("k_spp_per_um", 0.0);
    rc.fringe.stage_scale = fringe.positive_or("stage_scale", 1.0);
    if (fringe.has("positions")) {
        const Section grid = fringe.child("positions");
        rc.fringe.grid.start_nm = grid.number_or("start_nm", 0.0);
        rc.fringe.grid.step_nm = grid.positive("step_nm");
        const std::uint64_t count = grid.unsigned_integer("count");
        if (count < 8) {
            throw ValidationError(grid.path_of("count"), "need at least 8 stage positions");
        }
        rc.fringe.grid.count = static_cast<std::size_t>(count);
    }

    if (s.has("monte_carlo_instances")) {
        const std::uint64_t n = s.unsigned_integer("monte_carlo_instances");
        if (n == 0) {
            throw ValidationError(s.path_of("monte_carlo_instances"), "must be at least 1");
        }
        rc.monte_carlo_instances = static_cast<std::size_t>(n);
    }
    if (s.has("expect")) {
        rc.expect = parse_expect(s.child("expect"));
    }
    return rc;
}

G2Settings parse_g2(const Section& s) {
    G2Settings g;
    const Section src = s.child("source");
    g.source.herald_rate = src.positive("herald_rate_cps");
    g.source.transmission = src.probability_or("transmission", 1.0);
    g.source.multi_pair_prob = src.probability_or("multi_pair_prob", 0.0);
    g.source.dark_rate = src.non_negative_or("dark_rate_cps", 0.0);
    g.source.coincidence_window = src.positive_or("coincidence_window_ns", 8.0) * 1e-9;
    g.duration_s = s.positive("duration_s");
    if (s.has("expect")) {
        g.expect = s.number("expect");
    }
    g.tolerance = s.positive_or("tolerance", g.tolerance);
    return g;
}

DispersionSettings parse_dispersion(const Section& s, const std::filesystem::path& base_dir) {
    DispersionSettings d;
    const std::filesystem::path table = s.text("table_csv");
    d.table_csv = table.is_absolute() || base_dir.empty() ? table : base_dir / table;
    d.fwhm_nm = s.positive_or("fwhm_nm", d.fwhm_nm);
    d.length_um = s.non_negative_or("length_um", d.length_um);
    d.min_overlap = s.positive_or("min_overlap", d.min_overlap);
    return d;
}

}  // namespace

std::vector<double> PositionGrid::positions() const {
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = (start_nm + step_nm * static_cast<double>(i)) * 1e-9;
    }
    return out;
}

const RegimeConfig& ExperimentConfig::regime(Regime r) const {
    const auto it = regimes.find(r);
    if (it == regimes.end()) {
        throw ValidationError("regimes." + std::string(to_string(r)), "missing required section");
    }
    return it->second;
}

ChannelParams ExperimentConfig::truth(Regime r) const {
    const RegimeConfig& rc = regime(r);
    return ChannelParams{rc.gamma1_per_s, rc.gamma2_star_per_s, group_velocity_m_s};
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

ExperimentConfig parse_config(const json& input, const ConfigOverrides& overrides,
                              const std::filesystem::path& base_dir) {
    json effective = input;
    if (!effective.is_object()) {
        throw ValidationError("<root>", "configuration must be a JSON object");
    }
    if (overrides.seed) {
        effective["seed"] = *overrides.seed;
    }
    if (overrides.regime) {
        effective["regime"] = *overrides.regime;
    }

    const Section root(effective, "");
    ExperimentConfig cfg;
    cfg.seed = root.unsigned_integer("seed");
    if (root.has("noise")) {
        try {
            cfg.noise = noise_mode_from_string(root.text("noise"));
        } catch (const DomainError&) {
            throw ValidationError("noise", "must be poisson, mean or rounded_mean");
        }
    }
    cfg.group_velocity_m_s = root.positive("group_velocity_m_s");
    cfg.lambda0_nm = root.positive_or("lambda0_nm", cfg.lambda0_nm);

    const std::string which = root.has("regime") ? root.text("regime") : "both";
    if (which == "both") {
        cfg.selected = {Regime::classical, Regime::quantum};
    } else if (which == "classical" || which == "quantum") {
        cfg.selected = {regime_from_string(which)};
    } else {
        throw ValidationError("regime", "must be classical, quantum or both");
    }

    const Section regimes = root.child("regimes");
    for (Regime r : {Regime::classical, Regime::quantum}) {
        const std::string name(to_string(r));
        if (regimes.has(name)) {
            cfg.regimes.emplace(r, parse_regime(regimes.child(name), r));
        }
    }
    for (Regime r : cfg.selected) {
        if (!cfg.regimes.contains(r)) {
            if (which == "both") {
                continue;
            }
            throw ValidationError("regimes." + std::string(to_string(r)),
                                  "missing section for the selected regime");
        }
    }
    std::erase_if(cfg.selected, [&](Regime r) { return !cfg.regimes.contains(r); });
    if (cfg.selected.empty()) {
        throw ValidationError("regimes", "no regime section present");
    }

    if (root.has("g2")) {
        cfg.g2 = parse_g2(root.child("g2"));
    }
    if (root.has("dispersion")) {
        cfg.dispersion = parse_dispersion(root.child("dispersion"), base_dir);
    }
    if (root.has("output_dir")) {
        cfg.output_dir = root.text("output_dir");
    }

    cfg.effective = effective;
    cfg.hash = fnv1a_hex(effective.dump());
    return cfg;
}

json parse_json_text(const std::string& text, const std::string& origin) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        const std::size_t upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n');
        throw IoError(origin + ":" + std::to_string(line) + ": invalid JSON (" + e.what() + ")");
    }
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_json_text(buf.str(), path.string());
}

ExperimentConfig load_config(const std::filesystem::path& path, const ConfigOverrides& overrides) {
    return parse_config(read_json_file(path), overrides, path.parent_path());
}

}  // namespace spp
