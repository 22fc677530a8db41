#include <catch_amalgamated.hpp>

#include <cmath>
#include <fstream>
#include <numbers>

#include "spp/dispersion.hpp"
#include "spp/error.hpp"

using namespace spp;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Overlap of two normalised, co-centred Gaussian spectral amplitudes by
// trapezoidal quadrature over +-12 of the wider width.
double overlap_by_quadrature(double sa, double sb) {
    const auto amp = [](double w, double s) {
        return std::pow(2.0 * std::numbers::pi * s * s, -0.25) * std::exp(-w * w / (4.0 * s * s));
    };
    const double half = 12.0 * std::max(sa, sb);
    const int n = 200000;
    const double h = 2.0 * half / n;
    double sum = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double w = -half + i * h;
        const double f = amp(w, sa) * amp(w, sb);
        sum += (i == 0 || i == n) ? 0.5 * f : f;
    }
    return sum * h;
}

DispersionTable table_from(double omega0, double h, int half_points, auto inverse_vg) {
    DispersionTable t;
    t.omega0 = omega0;
    for (int k = -half_points; k <= half_points; ++k) {
        const double w = omega0 + k * h;
        t.samples.push_back({w, 1.0 / inverse_vg(w - omega0)});
    }
    return t;
}

}  // namespace

TEST_CASE("spectral width from a wavelength FWHM") {
    // Frozen from the closed form with c = 2.998e8.
    CHECK_THAT(sigma_omega_from_fwhm(40e-9, 810e-9), WithinRel(48768986061264.18, 1e-12));
    CHECK_THAT(sigma_omega_from_fwhm(80e-9, 810e-9),
               WithinRel(2.0 * sigma_omega_from_fwhm(40e-9, 810e-9), 1e-15));
    CHECK(sigma_omega_from_fwhm(1e-15, 810e-9) < 1e7);
    CHECK_THROWS_AS(sigma_omega_from_fwhm(0.0, 810e-9), DomainError);
    CHECK_THROWS_AS(sigma_omega_from_fwhm(40e-9, -1.0), DomainError);

    const WavepacketSpec packet = WavepacketSpec::from_fwhm(40e-9, 810e-9);
    CHECK_NOTHROW(packet.validate());
    CHECK_THAT(packet.sigma_t0 * packet.sigma_omega, WithinAbs(0.5, 1e-15));
}

TEST_CASE("temporal spread broadens with length") {
    CHECK(temporal_spread(1.025e-14, 90e-6, 0.0) == 1.025e-14);
    CHECK(temporal_spread(1.025e-14, 0.0, 5.81e-25) == 1.025e-14);
    CHECK_THAT(temporal_spread(1.025e-14, 90e-6, 5.81e-25), WithinRel(1.0562610105590032e-14, 1e-12));
    CHECK_THAT(temporal_spread(1.025e-14, 90e-6, 5.81e-25), WithinAbs(1.056e-14, 0.001e-14));

    double previous = 0.0;
    for (double l = 0.0; l < 1e-3; l += 1e-5) {
        const double s = temporal_spread(1e-14, l, 5.81e-25);
        REQUIRE(s >= previous);
        previous = s;
    }
    CHECK(temporal_spread(1e-14, 1e-4, -5.81e-25) == temporal_spread(1e-14, 1e-4, 5.81e-25));
    CHECK(temporal_spread(1e-14, 1e-4, 1e-24) > temporal_spread(1e-14, 1e-4, 5.81e-25));
    CHECK_THROWS_AS(temporal_spread(0.0, 1e-6, 1e-25), DomainError);
    CHECK_THROWS_AS(temporal_spread(1e-14, -1e-6, 1e-25), DomainError);
}

TEST_CASE("mode overlap closed form against quadrature") {
    CHECK(mode_overlap(3e13, 3e13) == 1.0);
    CHECK_THAT(mode_overlap(1e13, 2e13), WithinAbs(std::sqrt(0.8), 1e-15));
    CHECK_THAT(mode_overlap(1e13, 2e13), WithinAbs(0.8944, 5e-5));
    CHECK(mode_overlap(1e13, 2e13) == mode_overlap(2e13, 1e13));
    CHECK_THROWS_AS(mode_overlap(0.0, 1.0), DomainError);

    for (const auto& [a, b] : {std::pair{1.0, 2.0}, {1.0, 1.0}, {4.8e13, 4.7e13}, {3.0, 0.4}}) {
        CHECK_THAT(mode_overlap(a, b), WithinAbs(overlap_by_quadrature(a, b), 1e-9));
    }
}

TEST_CASE("overlap for the stripe waveguide parameters") {
    const DispersionCheck c = dispersion_overlap(40e-9, 810e-9, 90e-6, 5.81e-25);
    CHECK_THAT(c.sigma_omega, WithinRel(48768986061264.18, 1e-12));
    CHECK_THAT(c.sigma_t, WithinRel(1.0564810763029036e-14, 1e-12));
    CHECK_THAT(c.sigma_omega_t * c.sigma_t, WithinAbs(0.5, 1e-15));
    CHECK_THAT(c.overlap, WithinAbs(0.9997748308055393, 1e-12));
    CHECK(c.overlap >= 0.99);
    CHECK_THAT(c.overlap, WithinAbs(overlap_by_quadrature(c.sigma_omega, c.sigma_omega_t), 1e-9));
}

TEST_CASE("GVD coefficient from a table") {
    const double w0 = omega_from_wavelength(810e-9);
    const auto flat = table_from(w0, 1e12, 5, [](double) { return 1.0 / 2.958e8; });
    CHECK_THAT(gvd_coefficient(flat), WithinAbs(0.0, 1e-40));

    // Linear (and quadratic) 1/v_g is differentiated exactly, even off-node.
    const auto quad = [](double dw) { return 3.38e-9 + 5.81e-25 * dw + 2e-39 * dw * dw; };
    DispersionTable t = table_from(w0, 2.5e12, 10, quad);
    CHECK_THAT(gvd_coefficient(t), WithinRel(5.81e-25, 1e-9));
    t.omega0 = w0 + 0.3e12;
    CHECK_THAT(gvd_coefficient(t), WithinRel(5.81e-25 + 2.0 * 2e-39 * 0.3e12, 1e-9));

    // A cubic term gives an error that falls as h^2.
    const auto cubic = [](double dw) { return 3.38e-9 + 5.81e-25 * dw + 1e-51 * dw * dw * dw; };
    const double e1 = std::abs(gvd_coefficient(table_from(w0, 4e12, 4, cubic)) - 5.81e-25);
    const double e2 = std::abs(gvd_coefficient(table_from(w0, 2e12, 4, cubic)) - 5.81e-25);
    CHECK_THAT(e1 / e2, WithinRel(4.0, 1e-3));

    DispersionTable outside = table_from(w0, 1e12, 2, quad);
    outside.omega0 = w0 + 1e13;
    CHECK_THROWS_AS(gvd_coefficient(outside), RangeError);
    DispersionTable two = table_from(w0, 1e12, 2, quad);
    two.samples.resize(2);
    two.omega0 = two.samples.front().omega;
    CHECK_THROWS_AS(gvd_coefficient(two), InsufficientDataError);
}

TEST_CASE("shipped stripe-mode table reproduces the GVD coefficient") {
    const DispersionTable t = load_dispersion_table(SPP_DATA_DIR "/dispersion_stripe_810nm.csv",
                                                    omega_from_wavelength(810e-9));
    CHECK(t.samples.size() == 41);
    CHECK_THAT(gvd_coefficient(t), WithinRel(5.81e-25, 1e-6));
}

TEST_CASE("dispersion table file errors") {
    const auto dir = std::filesystem::temp_directory_path();
    const auto bad_header = dir / "spp_bad_header.csv";
    std::ofstream(bad_header) << "omega,vg\n1,2\n";
    CHECK_THROWS_AS(load_dispersion_table(bad_header, 1.0), IoError);
    const auto bad_row = dir / "spp_bad_row.csv";
    std::ofstream(bad_row) << "omega_rad_s,vg_m_s\n1,2\nabc\n";
    CHECK_THROWS_AS(load_dispersion_table(bad_row, 1.0), IoError);
    CHECK_THROWS_AS(load_dispersion_table(dir / "spp_missing_table.csv", 1.0), IoError);
}
