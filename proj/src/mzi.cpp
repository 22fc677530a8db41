#include "spp/mzi.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "spp/error.hpp"

namespace spp {

namespace {

void require_non_negative(double value, const char* name) {
    if (!(value >= 0.0)) {
        throw DomainError(std::string("mzi: ") + name + " must be non-negative, got " +
                          std::to_string(value));
    }
}

void check_strict(double g1p, double g2p) {
    if (std::exp(-g1p) + std::exp(-g2p) > 1.0 + 1e-12) {
        throw DomainError("mzi: strict probability mode requires e^-g1p + e^-g2p <= 1");
    }
}

struct Validator {
    ValidationMode mode;

    void operator()(const IdealMzi&) const {}
    void operator()(const DampedMzi& m) const {
        require_non_negative(m.gt1, "gt1");
        require_non_negative(m.gt2s, "gt2s");
    }
    void operator()(const NdBalancedMzi& m) const {
        require_non_negative(m.gamma_free, "gamma_free");
        require_non_negative(m.gt1, "gt1");
        require_non_negative(m.gt2s, "gt2s");
    }
    void operator()(const PolarizationSplitMzi& m) const {
        require_non_negative(m.g1p, "g1p");
        require_non_negative(m.g2p, "g2p");
        require_non_negative(m.gt1, "gt1");
        require_non_negative(m.gt2s, "gt2s");
        if (mode == ValidationMode::strict_probability) {
            check_strict(m.g1p, m.g2p);
        }
    }
    void operator()(const FullMzi& m) const {
        require_non_negative(m.reflectance, "reflectance");
        require_non_negative(m.transmittance, "transmittance");
        if (m.reflectance + m.transmittance > 1.0 + 1e-12) {
            throw DomainError("mzi: reflectance + transmittance must not exceed 1");
        }
        require_non_negative(m.g1p, "g1p");
        require_non_negative(m.g2p, "g2p");
        require_non_negative(m.gt1, "gt1");
        require_non_negative(m.gamma_eff, "gamma_eff");
        if (mode == ValidationMode::strict_probability) {
            check_strict(m.g1p, m.g2p);
        }
    }
};

struct TermsOf {
    FringeTerms operator()(const IdealMzi& m) const { return {0.5, 0.5, m.delta}; }
    FringeTerms operator()(const DampedMzi& m) const {
        return {0.25 * (1.0 + std::exp(-m.gt1)), 0.5 * std::exp(-0.5 * m.gt1 - m.gt2s), m.delta};
    }
    FringeTerms operator()(const NdBalancedMzi& m) const {
        return {0.25 * (std::exp(-m.gamma_free) + std::exp(-m.gt1)),
                0.5 * std::exp(-0.5 * (m.gamma_free + m.gt1) - m.gt2s), m.delta};
    }
    FringeTerms operator()(const PolarizationSplitMzi& m) const {
        return {0.5 * (std::exp(-m.g1p) + std::exp(-(m.gt1 + m.g2p))),
                std::exp(-0.5 * (m.g1p + m.g2p + m.gt1) - m.gt2s), m.delta};
    }
    FringeTerms operator()(const FullMzi& m) const {
        return {m.reflectance * std::exp(-m.g1p) + m.transmittance * std::exp(-(m.gt1 + m.g2p)),
                2.0 * std::sqrt(m.reflectance * m.transmittance) *
                    std::exp(-0.5 * (m.g1p + m.g2p + m.gt1) - m.gamma_eff),
                m.delta};
    }
};

}  // namespace

void validate(const MziModel& model, ValidationMode mode) {
    std::visit(Validator{mode}, model);
}

FringeTerms fringe_terms(const MziModel& model, ValidationMode mode) {
    validate(model, mode);
    return std::visit(TermsOf{}, model);
}

double fringe_probability(const MziModel& model, double phi, ValidationMode mode) {
    const FringeTerms terms = fringe_terms(model, mode);
    return terms.offset + terms.amplitude * std::cos(phi - terms.delta);
}

double visibility(const MziModel& model, ValidationMode mode) {
    const FringeTerms terms = fringe_terms(model, mode);
    if (!(terms.offset > 0.0)) {
        throw DegenerateModelError("mzi: both interferometer arms are fully damped");
    }
    return terms.amplitude / terms.offset;
}

OutputAmplitudes propagate_pure(double phi, double delta) {
    const std::complex<double> rot = std::polar(1.0, phi - delta);
    const std::complex<double> i{0.0, 1.0};
    return {0.5 * (1.0 - rot), 0.5 * i * (1.0 + rot)};
}

double balance_free_arm(double gt1, double g2p) {
    require_non_negative(gt1, "gt1");
    require_non_negative(g2p, "g2p");
    return gt1 + g2p;
}

double phase_from_stage(double x, const StageGeometry& geom) {
    if (!(geom.scale > 0.0) || !(geom.wavelength > 0.0)) {
        throw DomainError("mzi: stage geometry needs positive scale and wavelength");
    }
    return 2.0 * std::numbers::pi * geom.scale * x / geom.wavelength;
}

double wrap_phase(double phase) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double wrapped = std::fmod(phase, two_pi);
    if (wrapped < 0.0) {
        wrapped += two_pi;
    }
    // fmod of a value a hair below a multiple of 2 pi can round up to 2 pi.
    return wrapped >= two_pi ? 0.0 : wrapped;
}

double delta_from_waveguide(const PlasmonicPhase& p, bool wrap) {
    require_non_negative(p.length, "length");
    const double delta = p.k_spp * p.length;
    return wrap ? wrap_phase(delta) : delta;
}

}  // namespace spp
