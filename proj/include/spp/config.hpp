#pragma once

// Experiment configuration. The on-disk form is JSON with explicit units in
// every key name (length_um, rate_cps, ...); see README.md for the schema.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "spp/simkit.hpp"

namespace spp {

struct PositionGrid {
    double start_nm = 0.0;
    double step_nm = 40.5;
    std::size_t count = 60;

    /// Stage positions in metres.
    std::vector<double> positions() const;
};

struct DecaySettings {
    double base_rate_cps = 0.0;  // count rate at zero length
    double integration_s = 1.0;
};

struct FringeSettings {
    double peak_counts = 0.0;  // mean counts at the fringe maximum
    double reflectance = 0.5;
    double transmittance = 0.5;
    double gamma2_prime = 0.0;
    double k_spp_per_um = 0.0;
    double stage_scale = 1.0;
    PositionGrid grid;
};

/// Pass/fail expectations checked by the pipeline.
struct Expectations {
    std::optional<double> l_um;
    double l_rel_tol = 0.02;
    std::optional<double> slope_per_um;
    double slope_std_multiple = 1.0;
    std::optional<double> t2_s;
    double t2_rel_tol = 0.15;
};

struct RegimeConfig {
    Regime regime = Regime::quantum;
    double gamma1_per_s = 0.0;
    double gamma2_star_per_s = 0.0;
    double gamma_int = 0.0;
    std::vector<WaveguideSpec> waveguides;
    DecaySettings decay;
    FringeSettings fringe;
    std::size_t monte_carlo_instances = 200;
    Expectations expect;
};

struct G2Settings {
    SourceModel source;
    double duration_s = 0.0;
    std::optional<double> expect;
    double tolerance = 0.01;
};

struct DispersionSettings {
    std::filesystem::path table_csv;  // resolved against the config file directory
    double fwhm_nm = 40.0;
    double length_um = 90.0;
    double min_overlap = 0.99;
};

struct ExperimentConfig {
    std::uint64_t seed = 0;
    NoiseMode noise = NoiseMode::poisson;
    double group_velocity_m_s = 0.0;
    double lambda0_nm = 810.0;
    std::vector<Regime> selected;  // regimes to run, in order
    std::map<Regime, RegimeConfig> regimes;
    std::optional<G2Settings> g2;
    std::optional<DispersionSettings> dispersion;
    std::filesystem::path output_dir;

    /// Effective configuration after overrides, as canonical JSON.
    nlohmann::json effective;
    std::string hash;  // 16 hex digits, FNV-1a of effective.dump()

    const RegimeConfig& regime(Regime r) const;
    ChannelParams truth(Regime r) const;
};

struct ConfigOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> regime;  // classical | quantum | both
};

/// Validates and converts; ValidationError::field() names the offending key.
ExperimentConfig parse_config(const nlohmann::json& json, const ConfigOverrides& overrides = {},
                              const std::filesystem::path& base_dir = {});

ExperimentConfig load_config(const std::filesystem::path& path,
                             const ConfigOverrides& overrides = {});

/// Parses JSON text, reporting syntax errors as IoError with file:line.
nlohmann::json parse_json_text(const std::string& text, const std::string& origin);
nlohmann::json read_json_file(const std::filesystem::path& path);

std::string fnv1a_hex(const std::string& text);

}  // namespace spp
