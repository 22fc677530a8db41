#pragma once

// Detection-probability models for the Mach-Zehnder interferometer with a
// plasmonic waveguide in one arm. Every variant is a fringe of the form
// offset + amplitude * cos(phi - delta); they differ in how the arm dampings
// enter the two coefficients.

#include <complex>
#include <variant>

namespace spp {

/// Lossless interferometer: p = (1 + cos(phi - delta)) / 2.
struct IdealMzi {
    double delta = 0.0;
};

/// Waveguide arm with amplitude damping gt1 and pure phase damping gt2s
/// (both dimensionless, Gamma * length / v_g).
struct DampedMzi {
    double delta = 0.0;
    double gt1 = 0.0;
    double gt2s = 0.0;
};

/// DampedMzi plus a neutral-density filter damping `gamma_free` on the
/// free-space arm.
struct NdBalancedMzi {
    double delta = 0.0;
    double gamma_free = 0.0;
    double gt1 = 0.0;
    double gt2s = 0.0;
};

/// First splitter replaced by HWP + PBS; g1p and g2p are the polarisation
/// dampings of the free-space and plasmonic arms.
struct PolarizationSplitMzi {
    double delta = 0.0;
    double g1p = 0.0;
    double g2p = 0.0;
    double gt1 = 0.0;
    double gt2s = 0.0;
};

/// PolarizationSplitMzi with an asymmetric recombining splitter (R, T) and the
/// pure phase damping replaced by the effective damping gamma_eff, which also
/// absorbs imperfect mode overlap. Evaluates to a relative count rate: there
/// is no overall 1/2, so the scale is carried by the fitted input intensity.
struct FullMzi {
    double delta = 0.0;
    double reflectance = 0.5;
    double transmittance = 0.5;
    double g1p = 0.0;
    double g2p = 0.0;
    double gt1 = 0.0;
    double gamma_eff = 0.0;
};

using MziModel = std::variant<IdealMzi, DampedMzi, NdBalancedMzi, PolarizationSplitMzi, FullMzi>;

enum class ValidationMode {
    /// Non-negative dampings and R + T <= 1.
    rate,
    /// Additionally e^{-g1p} + e^{-g2p} <= 1, which bounds every variant by 1.
    strict_probability,
};

void validate(const MziModel& model, ValidationMode mode = ValidationMode::rate);

struct FringeTerms {
    double offset = 0.0;
    double amplitude = 0.0;
    double delta = 0.0;
};

/// Decomposes a model into offset + amplitude * cos(phi - delta).
FringeTerms fringe_terms(const MziModel& model, ValidationMode mode = ValidationMode::rate);

double fringe_probability(const MziModel& model, double phi,
                          ValidationMode mode = ValidationMode::rate);

/// (p_max - p_min) / (p_max + p_min). Throws DegenerateModelError when both
/// arms carry no signal.
double visibility(const MziModel& model, ValidationMode mode = ValidationMode::rate);

/// Output amplitudes of the lossless interferometer for one input photon.
struct OutputAmplitudes {
    std::complex<double> photon_in_mode2;  // |0>_1'' |1>_2''
    std::complex<double> photon_in_mode1;  // |1>_1'' |0>_2''
};

OutputAmplitudes propagate_pure(double phi, double delta);

/// Free-arm damping that equalises the two non-oscillating terms:
/// g1p = gt1 + g2p.
double balance_free_arm(double gt1, double g2p);

struct StageGeometry {
    double scale = 1.0;        // s
    double wavelength = 0.0;   // lambda0, metres
};

/// phi = 2 pi s x / lambda0, with x the total delay in metres.
double phase_from_stage(double x, const StageGeometry& geom);

struct PlasmonicPhase {
    double k_spp = 0.0;   // rad/m
    double length = 0.0;  // m
};

/// delta = k_spp * length, optionally wrapped into [0, 2 pi).
double delta_from_waveguide(const PlasmonicPhase& p, bool wrap = false);

double wrap_phase(double phase);

}  // namespace spp
