#include "spp/simkit.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "spp/error.hpp"
#include "spp/rng.hpp"

namespace spp {

std::string_view to_string(Regime regime) {
    return regime == Regime::classical ? "classical" : "quantum";
}

Regime regime_from_string(std::string_view text) {
    if (text == "classical") {
        return Regime::classical;
    }
    if (text == "quantum") {
        return Regime::quantum;
    }
    throw DomainError("unknown regime '" + std::string(text) + "'");
}

NoiseMode noise_mode_from_string(std::string_view text) {
    if (text == "poisson") {
        return NoiseMode::poisson;
    }
    if (text == "mean") {
        return NoiseMode::mean;
    }
    if (text == "rounded_mean") {
        return NoiseMode::rounded_mean;
    }
    throw DomainError("unknown noise mode '" + std::string(text) + "'");
}

void DecayScan::validate() const {
    for (std::size_t i = 0; i < points.size(); ++i) {
        const DecayPoint& p = points[i];
        if (!(p.counts >= 0.0)) {
            throw DomainError("decay scan: negative counts at point " + std::to_string(i));
        }
        if (!(p.integration_time > 0.0)) {
            throw DomainError("decay scan: integration time must be positive at point " +
                              std::to_string(i));
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (points[j].length == p.length) {
                throw DomainError("decay scan: duplicate length at point " + std::to_string(i));
            }
        }
    }
}

void FringeScan::validate() const {
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!(points[i].counts >= 0.0)) {
            throw DomainError("fringe scan: negative counts at point " + std::to_string(i));
        }
        if (i > 0 && !(points[i].x > points[i - 1].x)) {
            throw DomainError("fringe scan: positions must be strictly increasing");
        }
    }
    if (!(wavelength > 0.0)) {
        throw DomainError("fringe scan: wavelength must be positive");
    }
    spp::validate(FullMzi{0.0, known.reflectance, known.transmittance, known.g1p, known.g2p, known.gt1,
                     0.0});
}

void G2Counts::validate() const {
    if (n_abc > std::min(n_ab, n_ac) || std::min(n_ab, n_ac) > n_herald) {
        throw DomainError("g2 counts violate n_abc <= min(n_ab, n_ac) <= n_herald");
    }
}

void SourceModel::validate() const {
    const auto prob = [](double p, const char* name) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw DomainError(std::string("source: ") + name + " must lie in [0, 1]");
        }
    };
    prob(transmission, "transmission");
    prob(multi_pair_prob, "multi_pair_prob");
    if (!(herald_rate >= 0.0) || !(dark_rate >= 0.0)) {
        throw DomainError("source: rates must be non-negative");
    }
    if (!(coincidence_window > 0.0)) {
        throw DomainError("source: coincidence window must be positive");
    }
}

namespace {

double realise(Engine& engine, double mean, NoiseMode noise) {
    switch (noise) {
        case NoiseMode::poisson:
            return draw_poisson(engine, mean);
        case NoiseMode::mean:
            return mean;
        case NoiseMode::rounded_mean:
            return std::round(mean);
    }
    return mean;
}

}  // namespace

DecayScan simulate_decay_scan(const ChannelParams& truth, std::span<const double> lengths,
                              double base_rate, double integration_time, Regime regime,
                              std::uint64_t seed, NoiseMode noise) {
    truth.validate();
    if (lengths.empty()) {
        throw DomainError("decay scan: no waveguide lengths");
    }
    if (!(base_rate > 0.0) || !(integration_time > 0.0)) {
        throw DomainError("decay scan: base rate and integration time must be positive");
    }
    const std::uint64_t stream = stream_id(std::string("decay/") + std::string(to_string(regime)));
    DecayScan scan;
    scan.regime = regime;
    scan.points.reserve(lengths.size());
    for (std::size_t i = 0; i < lengths.size(); ++i) {
        const double gt1 = dimensionless_damping(truth.gamma1, lengths[i], truth.group_velocity);
        const double mean = base_rate * integration_time * std::exp(-gt1);
        Engine engine = make_engine(seed, stream, i);
        scan.points.push_back({lengths[i], realise(engine, mean, noise), integration_time});
    }
    scan.validate();
    return scan;
}

double effective_phase_damping(const FringeTruth& truth, double length) {
    return dimensionless_damping(truth.channel.gamma2_star, length, truth.channel.group_velocity) +
           truth.gamma_int;
}

FullMzi fringe_model(const FringeTruth& truth, double length) {
    truth.channel.validate();
    if (!(truth.gamma_int >= 0.0)) {
        throw DomainError("fringe truth: gamma_int must be non-negative");
    }
    const double gt1 = dimensionless_damping(truth.channel.gamma1, length,
                                             truth.channel.group_velocity);
    const double balanced_for = truth.assumed_gt1.value_or(gt1);
    FullMzi model;
    model.delta = delta_from_waveguide({truth.k_spp, length}, true);
    model.reflectance = truth.reflectance;
    model.transmittance = truth.transmittance;
    model.g2p = truth.g2p;
    model.g1p = balance_free_arm(balanced_for, truth.g2p);
    model.gt1 = gt1;
    model.gamma_eff = effective_phase_damping(truth, length);
    validate(model);
    return model;
}

FringeScan simulate_fringe_scan(const FringeTruth& truth, const WaveguideSpec& waveguide,
                                std::span<const double> positions, const StageGeometry& geom,
                                double amplitude, Regime regime, std::uint64_t seed,
                                NoiseMode noise) {
    if (positions.empty()) {
        throw DomainError("fringe scan: no stage positions");
    }
    if (!(amplitude > 0.0)) {
        throw DomainError("fringe scan: amplitude must be positive");
    }
    const FullMzi model = fringe_model(truth, waveguide.length);

    FringeScan scan;
    scan.waveguide = waveguide;
    scan.regime = regime;
    scan.wavelength = geom.wavelength;
    scan.known = {model.reflectance, model.transmittance, model.g1p, model.g2p,
                  truth.assumed_gt1.value_or(model.gt1)};

    const std::uint64_t stream = stream_id(std::string("fringe/") +
                                           std::string(to_string(regime)) + "/" +
                                           waveguide.label);
    scan.points.reserve(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) {
        const double phi = phase_from_stage(positions[i], geom);
        const double mean = amplitude * fringe_probability(model, phi);
        Engine engine = make_engine(seed, stream, i);
        const double counts = realise(engine, std::max(mean, 0.0), noise);
        scan.points.push_back({positions[i], counts, std::sqrt(counts)});
    }
    scan.validate();
    return scan;
}

std::vector<double> linear_positions(double start, double stop, std::size_t count) {
    if (count < 2 || !(stop > start)) {
        throw DomainError("position grid needs at least 2 points and stop > start");
    }
    std::vector<double> out(count);
    const double step = (stop - start) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = start + step * static_cast<double>(i);
    }
    out.back() = stop;
    return out;
}

HbtProbabilities hbt_probabilities(const SourceModel& source) {
    source.validate();
    const double eta = source.transmission;
    const double dark = -std::expm1(-source.dark_rate * source.coincidence_window);

    HbtProbabilities out;
    // One photon with probability 1 - p_multi, two with p_multi. Each photon
    // independently reaches B or C with probability eta / 2.
    for (int photons = 1; photons <= 2; ++photons) {
        const double weight = photons == 1 ? 1.0 - source.multi_pair_prob : source.multi_pair_prob;
        const double none_b = std::pow(1.0 - 0.5 * eta, photons) * (1.0 - dark);
        const double none_c = none_b;
        const double none_bc = std::pow(1.0 - eta, photons) * (1.0 - dark) * (1.0 - dark);
        const double both = 1.0 - none_b - none_c + none_bc;
        out.both += weight * both;
        out.b_only += weight * (1.0 - none_b - both);
        out.c_only += weight * (1.0 - none_c - both);
    }
    return out;
}

double expected_g2(const SourceModel& source) {
    const HbtProbabilities p = hbt_probabilities(source);
    if (!(p.b() > 0.0) || !(p.c() > 0.0)) {
        throw InsufficientDataError("g2: source never produces a click");
    }
    return p.both / (p.b() * p.c());
}

G2Counts simulate_g2_counts(const SourceModel& source, double duration, std::uint64_t seed) {
    if (!(duration > 0.0)) {
        throw DomainError("g2: duration must be positive");
    }
    const HbtProbabilities p = hbt_probabilities(source);
    Engine engine = make_engine(seed, stream_id("g2"), 0);

    // Per-herald outcomes are i.i.d. categorical, so the totals are a
    // multinomial split of the herald count; draw it as chained binomials.
    G2Counts counts;
    counts.window = source.coincidence_window;
    counts.n_herald = static_cast<std::uint64_t>(draw_poisson(engine, source.herald_rate * duration));

    std::uint64_t remaining = counts.n_herald;
    double mass = 1.0;
    const auto take = [&](double prob) -> std::uint64_t {
        if (remaining == 0 || prob <= 0.0) {
            return 0;
        }
        const double q = std::clamp(prob / mass, 0.0, 1.0);
        std::binomial_distribution<std::uint64_t> dist(remaining, q);
        const std::uint64_t k = dist(engine);
        remaining -= k;
        mass -= prob;
        return k;
    };
    const std::uint64_t both = take(p.both);
    const std::uint64_t b_only = take(p.b_only);
    const std::uint64_t c_only = take(p.c_only);

    counts.n_abc = both;
    counts.n_ab = both + b_only;
    counts.n_ac = both + c_only;
    counts.validate();
    return counts;
}

double estimate_g2(const G2Counts& counts) {
    counts.validate();
    if (counts.n_ab == 0 || counts.n_ac == 0) {
        throw InsufficientDataError("g2: no coincidences between herald and one of the detectors");
    }
    return static_cast<double>(counts.n_abc) * static_cast<double>(counts.n_herald) /
           (static_cast<double>(counts.n_ab) * static_cast<double>(counts.n_ac));
}

}  // namespace spp
