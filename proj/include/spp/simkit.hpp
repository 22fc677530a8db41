#pragma once

// Synthetic counting experiments: waveguide cut-back decay scans, MZI fringe
// scans and heralded HBT records for g2(0). All randomness is derived from a
// caller-supplied seed (see rng.hpp).

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spp/channels.hpp"
#include "spp/mzi.hpp"

namespace spp {

enum class Regime { classical, quantum };

std::string_view to_string(Regime regime);
Regime regime_from_string(std::string_view text);

enum class NoiseMode {
    poisson,
    /// Exact expectation values, not rounded. Used as an oracle for the fits.
    mean,
    /// Expectation values rounded to the nearest integer count.
    rounded_mean,
};

NoiseMode noise_mode_from_string(std::string_view text);

struct WaveguideSpec {
    double length = 0.0;  // m
    std::string label;
};

struct DecayPoint {
    double length = 0.0;            // m
    double counts = 0.0;
    double integration_time = 0.0;  // s
};

struct DecayScan {
    Regime regime = Regime::quantum;
    std::vector<DecayPoint> points;

    void validate() const;
};

struct FringePoint {
    double x = 0.0;       // total stage delay, m
    double counts = 0.0;
    double sigma = 0.0;
};

/// Interferometer settings the experimenter knows for a given waveguide.
struct FringeKnowns {
    double reflectance = 0.5;
    double transmittance = 0.5;
    double g1p = 0.0;
    double g2p = 0.0;
    double gt1 = 0.0;
};

struct FringeScan {
    WaveguideSpec waveguide;
    Regime regime = Regime::quantum;
    double wavelength = 810e-9;  // lambda0 of the stage phase conversion
    FringeKnowns known;
    std::vector<FringePoint> points;

    void validate() const;
};

struct G2Counts {
    std::uint64_t n_herald = 0;
    std::uint64_t n_ab = 0;
    std::uint64_t n_ac = 0;
    std::uint64_t n_abc = 0;
    double window = 8e-9;  // s

    void validate() const;
};

struct SourceModel {
    double herald_rate = 0.0;       // counts/s
    double transmission = 1.0;      // per heralded photon, up to the HBT splitter
    double multi_pair_prob = 0.0;   // chance a herald window holds a second photon
    double dark_rate = 0.0;         // counts/s per detector
    double coincidence_window = 8e-9;

    void validate() const;
};

DecayScan simulate_decay_scan(const ChannelParams& truth, std::span<const double> lengths,
                              double base_rate, double integration_time, Regime regime,
                              std::uint64_t seed, NoiseMode noise = NoiseMode::poisson);

/// Ground truth and instrument settings behind a fringe scan.
struct FringeTruth {
    ChannelParams channel;
    double gamma_int = 0.0;
    double reflectance = 0.5;
    double transmittance = 0.5;
    double g2p = 0.0;
    double k_spp = 0.0;                 // rad/m, sets delta = k_spp * length
    /// The experimenter's value of length / L. It balances the free arm and is
    /// recorded as the known gt1. Defaults to the true value.
    std::optional<double> assumed_gt1;
};

/// Effective phase damping seen by the interferometer:
/// Gamma2* length / v_g + Gamma_int.
double effective_phase_damping(const FringeTruth& truth, double length);

/// The FullMzi model the simulator draws from, for a given waveguide.
FullMzi fringe_model(const FringeTruth& truth, double length);

FringeScan simulate_fringe_scan(const FringeTruth& truth, const WaveguideSpec& waveguide,
                                std::span<const double> positions, const StageGeometry& geom,
                                double amplitude, Regime regime, std::uint64_t seed,
                                NoiseMode noise = NoiseMode::poisson);

/// Evenly spaced stage positions [start, stop], `count` points.
std::vector<double> linear_positions(double start, double stop, std::size_t count);

/// Herald-window outcome probabilities for the HBT arrangement.
struct HbtProbabilities {
    double b_only = 0.0;
    double c_only = 0.0;
    double both = 0.0;

    double b() const { return b_only + both; }
    double c() const { return c_only + both; }
};

HbtProbabilities hbt_probabilities(const SourceModel& source);

/// g2(0) that the heralded estimator converges to for this source.
double expected_g2(const SourceModel& source);

G2Counts simulate_g2_counts(const SourceModel& source, double duration, std::uint64_t seed);

/// n_abc * n_herald / (n_ab * n_ac).
double estimate_g2(const G2Counts& counts);

}  // namespace spp
