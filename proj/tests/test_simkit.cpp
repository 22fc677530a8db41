#include <catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <random>
#include <thread>

#include "spp/error.hpp"
#include "spp/estimate.hpp"
#include "spp/simkit.hpp"

using namespace spp;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double vg = 2.958e8;
const std::array<double, 4> quantum_lengths{7.47e-6, 12.47e-6, 17.47e-6, 22.47e-6};

FringeTruth quantum_truth() {
    FringeTruth t;
    t.channel = {5.27e13, 0.030e6 * vg, vg};
    t.gamma_int = 0.893;
    t.k_spp = 7.91e6;
    return t;
}

// P(B clicks and C clicks) and the single-detector click probabilities,
// by enumerating where each photon goes (B, C or lost) and then adding
// independent dark clicks.
struct RouteOracle {
    double b = 0.0, c = 0.0, both = 0.0;
};

RouteOracle enumerate_routes(const SourceModel& s) {
    const double dark = 1.0 - std::exp(-s.dark_rate * s.coincidence_window);
    const std::array<double, 3> route{s.transmission / 2, s.transmission / 2, 1 - s.transmission};
    RouteOracle o;
    const auto add = [&](double weight, bool hit_b, bool hit_c) {
        const double pb = hit_b ? 1.0 : dark;
        const double pc = hit_c ? 1.0 : dark;
        o.b += weight * pb;
        o.c += weight * pc;
        o.both += weight * pb * pc;
    };
    for (int r = 0; r < 3; ++r) {
        add((1 - s.multi_pair_prob) * route[r], r == 0, r == 1);
    }
    for (int r1 = 0; r1 < 3; ++r1) {
        for (int r2 = 0; r2 < 3; ++r2) {
            add(s.multi_pair_prob * route[r1] * route[r2], r1 == 0 || r2 == 0, r1 == 1 || r2 == 1);
        }
    }
    return o;
}

SourceModel fixture_source() {
    SourceModel s;
    s.herald_rate = 2e5;
    s.transmission = 0.05;
    s.multi_pair_prob = 0.1795;
    s.dark_rate = 50.0;
    s.coincidence_window = 8e-9;
    return s;
}

}  // namespace

TEST_CASE("decay scan means follow the exponential") {
    const ChannelParams truth{vg / 5.61e-6, 0.0, vg};
    const std::array<double, 1> at_l{5.61e-6};
    const DecayScan one = simulate_decay_scan(truth, at_l, 4000.0, 24.0, Regime::quantum, 1,
                                              NoiseMode::mean);
    CHECK_THAT(one.points[0].counts, WithinRel(4000.0 * 24.0 * std::exp(-1.0), 1e-14));

    const DecayScan rounded = simulate_decay_scan(truth, quantum_lengths, 4000.0, 24.0,
                                                  Regime::quantum, 1, NoiseMode::rounded_mean);
    for (const DecayPoint& p : rounded.points) {
        CHECK(p.counts == std::round(96000.0 * std::exp(-p.length / 5.61e-6)));
        CHECK(p.integration_time == 24.0);
    }
    CHECK(rounded.regime == Regime::quantum);
}

TEST_CASE("decay scans are deterministic in the seed") {
    const ChannelParams truth{5.27e13, 0.0, vg};
    const auto run = [&](std::uint64_t seed) {
        return simulate_decay_scan(truth, quantum_lengths, 4000.0, 24.0, Regime::quantum, seed);
    };
    const DecayScan a = run(42);
    DecayScan b;
    std::thread([&] { b = run(42); }).join();
    const DecayScan c = run(43);
    bool any_diff = false;
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        CHECK(a.points[i].counts == b.points[i].counts);
        any_diff = any_diff || a.points[i].counts != c.points[i].counts;
    }
    CHECK(any_diff);

    // The regimes use separate streams.
    const DecayScan classical =
        simulate_decay_scan(truth, quantum_lengths, 4000.0, 24.0, Regime::classical, 42);
    CHECK(classical.points[0].counts != a.points[0].counts);
}

TEST_CASE("Poisson means converge to the model mean over seeds") {
    const ChannelParams truth{5.27e13, 0.0, vg};
    const int n_seeds = 400;
    std::array<double, 4> sum{};
    for (int seed = 0; seed < n_seeds; ++seed) {
        const DecayScan s = simulate_decay_scan(truth, quantum_lengths, 4000.0, 1.0,
                                                Regime::quantum, static_cast<std::uint64_t>(seed));
        for (std::size_t i = 0; i < 4; ++i) {
            sum[i] += s.points[i].counts;
        }
    }
    for (std::size_t i = 0; i < 4; ++i) {
        const double mu = 4000.0 * std::exp(-quantum_lengths[i] * 5.27e13 / vg);
        CHECK(std::abs(sum[i] / n_seeds - mu) <= 3.0 * std::sqrt(mu / n_seeds));
    }
}

TEST_CASE("decay simulation rejects bad inputs") {
    const ChannelParams truth{5.27e13, 0.0, vg};
    CHECK_THROWS_AS(simulate_decay_scan(truth, std::span<const double>{}, 1.0, 1.0,
                                        Regime::quantum, 1),
                    DomainError);
    CHECK_THROWS_AS(simulate_decay_scan(truth, quantum_lengths, 0.0, 1.0, Regime::quantum, 1),
                    DomainError);
    CHECK_THROWS_AS(simulate_decay_scan(truth, quantum_lengths, 1.0, 0.0, Regime::quantum, 1),
                    DomainError);

    DecayScan dup;
    dup.points = {{1e-6, 5.0, 1.0}, {1e-6, 4.0, 1.0}};
    CHECK_THROWS_AS(dup.validate(), DomainError);
    CHECK_THROWS_AS(regime_from_string("semi"), DomainError);
    CHECK(regime_from_string("classical") == Regime::classical);
    CHECK(noise_mode_from_string("rounded_mean") == NoiseMode::rounded_mean);
}

TEST_CASE("effective damping and visibility of the quantum shortest guide") {
    const FringeTruth truth = quantum_truth();
    CHECK_THAT(effective_phase_damping(truth, 7.47e-6), WithinAbs(1.1171, 1e-12));
    const FullMzi model = fringe_model(truth, 7.47e-6);
    CHECK_THAT(visibility(model), WithinAbs(std::exp(-1.1171), 1e-12));
    CHECK_THAT(visibility(model), WithinAbs(0.327, 5e-4));
    CHECK_THAT(model.g1p, WithinAbs(model.gt1 + model.g2p, 1e-15));
}

TEST_CASE("undamped balanced interferometer gives a perfect fringe") {
    FringeTruth truth;
    truth.channel = {0.0, 0.0, vg};
    const std::vector<double> x = linear_positions(0.0, 810e-9 * 59.0 / 20.0, 60);
    const FringeScan scan = simulate_fringe_scan(truth, {10e-6, "w"}, x, {1.0, 810e-9}, 1000.0,
                                                 Regime::quantum, 5, NoiseMode::mean);
    double lo = 1e300, hi = 0.0;
    for (const FringePoint& p : scan.points) {
        lo = std::min(lo, p.counts);
        hi = std::max(hi, p.counts);
    }
    CHECK_THAT(lo, WithinAbs(0.0, 1e-9));
    CHECK_THAT(hi, WithinRel(2000.0, 1e-12));  // FullMzi peaks at (sqrt R + sqrt T)^2 = 2
    CHECK_THAT(empirical_visibility(scan, 1.0), WithinAbs(1.0, 1e-12));
}

TEST_CASE("fringe scan records knowns, sigma and is deterministic") {
    FringeTruth truth = quantum_truth();
    truth.g2p = 0.2;
    truth.assumed_gt1 = 1.3;
    const std::vector<double> x = linear_positions(0.0, 59 * 40.5e-9, 60);
    const auto run = [&](std::uint64_t seed) {
        return simulate_fringe_scan(truth, {7.47e-6, "wg1"}, x, {1.0, 810e-9}, 250.0,
                                    Regime::quantum, seed);
    };
    const FringeScan a = run(42);
    CHECK(a.known.gt1 == 1.3);
    CHECK_THAT(a.known.g1p, WithinAbs(1.5, 1e-15));
    CHECK(a.known.g2p == 0.2);
    CHECK(a.wavelength == 810e-9);
    for (const FringePoint& p : a.points) {
        CHECK(p.sigma == std::sqrt(p.counts));
    }
    const FringeScan b = run(42);
    const FringeScan c = run(7);
    bool differs = false;
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        CHECK(a.points[i].counts == b.points[i].counts);
        differs = differs || a.points[i].counts != c.points[i].counts;
    }
    CHECK(differs);

    CHECK_THROWS_AS(simulate_fringe_scan(truth, {7.47e-6, "w"}, std::span<const double>{},
                                         {1.0, 810e-9}, 250.0, Regime::quantum, 1),
                    DomainError);
    FringeTruth bad = truth;
    bad.gamma_int = -0.1;
    CHECK_THROWS_AS(fringe_model(bad, 7.47e-6), DomainError);
    bad = truth;
    bad.reflectance = 0.7;
    CHECK_THROWS_AS(fringe_model(bad, 7.47e-6), DomainError);
}

TEST_CASE("HBT probabilities against route enumeration") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        SourceModel s;
        s.transmission = u(rng);
        s.multi_pair_prob = u(rng);
        s.dark_rate = 1e7 * u(rng);
        s.coincidence_window = 8e-9;
        const HbtProbabilities p = hbt_probabilities(s);
        const RouteOracle o = enumerate_routes(s);
        REQUIRE_THAT(p.b(), WithinAbs(o.b, 1e-14));
        REQUIRE_THAT(p.c(), WithinAbs(o.c, 1e-14));
        REQUIRE_THAT(p.both, WithinAbs(o.both, 1e-14));
    }
    const RouteOracle f = enumerate_routes(fixture_source());
    CHECK_THAT(expected_g2(fixture_source()), WithinRel(f.both / (f.b * f.c), 1e-12));
    CHECK_THAT(expected_g2(fixture_source()), WithinAbs(0.26004, 5e-5));
}

TEST_CASE("single photons never give triple coincidences") {
    SourceModel s = fixture_source();
    s.multi_pair_prob = 0.0;
    s.dark_rate = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const G2Counts c = simulate_g2_counts(s, 100.0, seed);
        CHECK(c.n_abc == 0);
        CHECK(c.n_ab > 0);
        CHECK(estimate_g2(c) == 0.0);
    }
}

TEST_CASE("uncorrelated clicks give g2 near one") {
    // Only dark counts reach the detectors, so B and C are independent of each other.
    SourceModel s;
    s.herald_rate = 1e6;
    s.transmission = 0.0;
    s.dark_rate = 1e6;
    s.coincidence_window = 8e-9;
    CHECK_THAT(expected_g2(s), WithinAbs(1.0, 1e-12));
    const G2Counts c = simulate_g2_counts(s, 100.0, 2024);
    const double g2 = estimate_g2(c);
    // Relative std of the estimator is about 1 / sqrt(n_abc).
    CHECK(std::abs(g2 - 1.0) <= 3.0 / std::sqrt(static_cast<double>(c.n_abc)));
}

TEST_CASE("calibrated source reproduces g2 = 0.26") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const double g2 = estimate_g2(simulate_g2_counts(fixture_source(), 1000.0, seed));
        CHECK_THAT(g2, WithinAbs(0.26, 0.01));
    }
}

TEST_CASE("generated g2 records satisfy the ordering invariant") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        SourceModel s;
        s.herald_rate = 1e4 * u(rng);
        s.transmission = u(rng);
        s.multi_pair_prob = u(rng);
        s.dark_rate = 1e6 * u(rng);
        const G2Counts c = simulate_g2_counts(s, 1.0 + u(rng), static_cast<std::uint64_t>(i));
        REQUIRE(c.n_abc <= std::min(c.n_ab, c.n_ac));
        REQUIRE(std::max(c.n_ab, c.n_ac) <= c.n_herald);
    }
}

TEST_CASE("g2 estimator arithmetic") {
    CHECK(estimate_g2({1000000, 10000, 10000, 0}) == 0.0);
    CHECK(estimate_g2({1000000, 10000, 10000, 100}) == 1.0);
    CHECK_THAT(estimate_g2({1000000, 10000, 10000, 26}), WithinAbs(0.26, 1e-15));
    CHECK_THROWS_AS(estimate_g2({1000, 0, 10, 0}), InsufficientDataError);
    CHECK_THROWS_AS(estimate_g2({1000, 10, 10, 11}), DomainError);
    CHECK_THROWS_AS(estimate_g2({5, 10, 10, 1}), DomainError);
    CHECK_THROWS_AS(simulate_g2_counts(fixture_source(), 0.0, 1), DomainError);
    SourceModel bad = fixture_source();
    bad.transmission = 1.5;
    CHECK_THROWS_AS(bad.validate(), DomainError);
}
