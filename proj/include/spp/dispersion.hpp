#pragma once

// Group-velocity dispersion of the stripe mode and its effect on a Gaussian
// single-excitation wavepacket.

#include <filesystem>
#include <vector>

namespace spp {

inline constexpr double kSpeedOfLight = 2.998e8;  // m/s

struct DispersionSample {
    double omega = 0.0;           // rad/s
    double group_velocity = 0.0;  // m/s
};

/// Tabulated v_g(omega) with the carrier frequency omega0 at which the GVD is
/// evaluated.
struct DispersionTable {
    std::vector<DispersionSample> samples;
    double omega0 = 0.0;

    void validate() const;
};

/// Reads `omega_rad_s,vg_m_s` CSV rows (ascending omega).
DispersionTable load_dispersion_table(const std::filesystem::path& path, double omega0);

/// Angular frequency for a free-space wavelength.
double omega_from_wavelength(double lambda0);

/// D = d(1/v_g)/d omega at omega0, in s/(m rad/s). Uses the three-point
/// stencil around the sample nearest omega0; on a uniform grid with omega0
/// on a node this is the central difference.
double gvd_coefficient(const DispersionTable& table);

/// Spectral standard deviation (rad/s) of a Gaussian with wavelength FWHM
/// `delta_lambda` centred on `lambda0`.
double sigma_omega_from_fwhm(double delta_lambda, double lambda0);

struct WavepacketSpec {
    double sigma_omega = 0.0;  // rad/s
    double sigma_t0 = 0.0;     // s, = 1 / (2 sigma_omega)
    double lambda0 = 0.0;      // m

    static WavepacketSpec from_fwhm(double delta_lambda, double lambda0);
    void validate() const;
};

/// Temporal width after `length` metres: sqrt(st0^2 + (length D / (2 st0))^2).
double temporal_spread(double sigma_t0, double length, double gvd);

/// <xi_a | xi_b> for two co-centred, normalised Gaussian spectral amplitudes.
double mode_overlap(double sigma_omega_a, double sigma_omega_b);

struct DispersionCheck {
    double sigma_omega = 0.0;
    double sigma_t0 = 0.0;
    double sigma_t = 0.0;
    double sigma_omega_t = 0.0;
    double overlap = 0.0;
};

/// Overlap between the free-space wavepacket and the one that travelled
/// `length` through a medium with GVD coefficient `gvd`.
DispersionCheck dispersion_overlap(double delta_lambda, double lambda0, double length, double gvd);

}  // namespace spp
