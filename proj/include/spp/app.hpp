#pragma once

// Command implementations behind the sppdeco executable. Kept in the library
// so the integration tests can drive them without spawning processes.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "spp/config.hpp"
#include "spp/dispersion.hpp"
#include "spp/error.hpp"
#include "spp/estimate.hpp"

namespace spp::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_checks_failed = 1,
    exit_validation = 2,
    exit_fit_failure = 3,
    exit_io = 4,
};

int exit_code_for(const Error& error);

enum class SimKind { decay, fringe, g2 };
SimKind sim_kind_from_string(std::string_view text);

struct SimulateOutput {
    std::vector<std::filesystem::path> files;
    std::filesystem::path manifest_path;
    nlohmann::json manifest;
};

/// Writes one CSV per waveguide (decay, fringe) or a single g2 CSV, plus
/// manifest_<kind>.json listing them with the config hash and seed.
SimulateOutput run_simulate(const ExperimentConfig& config, SimKind kind,
                            const std::filesystem::path& out_dir);

struct WaveguideResult {
    WaveguideSpec waveguide;
    FringeKnowns known;
    FringeFit direct;
    MonteCarloSummary monte_carlo;
    WindowRefit windows;
    double empirical_visibility = 0.0;
    Measured gamma_eff;  // Monte-Carlo mean and std used for the line fit
};

struct Check {
    std::string name;
    double value = 0.0;
    double expected = 0.0;
    double tolerance = 0.0;  // absolute
    bool pass = false;
};

struct RegimeResult {
    Regime regime = Regime::quantum;
    std::optional<DecayFit> decay;
    std::vector<WaveguideResult> waveguides;
    std::optional<LineFit> line;
    bool slope_clamped = false;
    std::optional<DecoherenceSummary> summary;
    bool t2_at_bound = false;
    std::vector<Check> checks;

    bool pass() const;
};

struct DispersionResult {
    double gvd = 0.0;
    DispersionCheck check;
    double min_overlap = 0.99;
    bool pass() const { return check.overlap >= min_overlap; }
};

struct G2Result {
    G2Counts counts;
    double g2 = 0.0;
    double model_g2 = 0.0;
    std::optional<double> expect;
    double tolerance = 0.01;
    bool pass() const;
};

struct ReportRecord {
    std::string config_hash;
    std::uint64_t seed = 0;
    std::vector<RegimeResult> regimes;
    std::optional<DispersionResult> dispersion;
    std::optional<G2Result> g2;

    const RegimeResult& regime(Regime r) const;
    bool pass() const;
    nlohmann::json to_json() const;
};

/// Fringe analysis for one waveguide: direct fit, Monte-Carlo refits and
/// period-window refits.
WaveguideResult analyse_fringe(const FringeScan& scan, std::size_t mc_instances,
                               std::uint64_t seed, double stage_scale = 1.0);

/// Line fit through the per-waveguide Gamma_eff values and, given a decay fit,
/// the decoherence summary and expectation checks.
void finish_regime(RegimeResult& result, double group_velocity, const Expectations* expect);

DispersionResult run_dispersion_check(const DispersionSettings& settings, double lambda0_nm);

/// Simulate -> fit -> summarise for every selected regime, plus the
/// dispersion and g2 checks. Writes scans and report.json when out_dir is set.
ReportRecord run_pipeline(const ExperimentConfig& config,
                          const std::optional<std::filesystem::path>& out_dir);

/// Fits every scan listed in the given manifests. Returns the same JSON shape
/// as ReportRecord::to_json (without checks).
nlohmann::json run_fit(std::span<const std::filesystem::path> manifests);

/// Merges the "regimes" sections of report or fit JSON files; later files win.
nlohmann::json merge_results(std::span<const std::filesystem::path> files);

/// Fixed-width table of the six decoherence quantities, one column per regime
/// (classical first). Cells read "mantissa +/- std x10^exp".
std::string render_report(const nlohmann::json& merged);

}  // namespace spp::cli
