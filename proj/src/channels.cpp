#include "spp/channels.hpp"

#include <cmath>
#include <string>

#include "spp/error.hpp"

namespace spp {

namespace {

void require_non_negative(double value, const char* name) {
    if (!(value >= 0.0)) {
        throw DomainError(std::string(name) + " must be non-negative, got " + std::to_string(value));
    }
}

void require_positive(double value, const char* name) {
    if (!(value > 0.0)) {
        throw DomainError(std::string(name) + " must be positive, got " + std::to_string(value));
    }
}

}  // namespace

bool DensityMatrix2::is_valid(double tol) const {
    if (!std::isfinite(rho00) || !std::isfinite(rho11) || !std::isfinite(std::abs(rho01))) {
        return false;
    }
    if (rho00 < -tol || rho11 < -tol) {
        return false;
    }
    if (std::abs(trace() - 1.0) > tol) {
        return false;
    }
    return std::norm(rho01) <= rho00 * rho11 + tol;
}

void ChannelParams::validate() const {
    require_non_negative(gamma1, "gamma1");
    require_non_negative(gamma2_star, "gamma2_star");
    require_positive(group_velocity, "group_velocity");
}

DensityMatrix2 apply_amplitude_damping(const DensityMatrix2& rho, double gamma1, double t) {
    require_non_negative(gamma1, "gamma1");
    require_non_negative(t, "t");
    const double decay = std::exp(-gamma1 * t);
    DensityMatrix2 out;
    // (1 - e^{-x}) via expm1 keeps small-time populations exact to the last bit.
    out.rho00 = rho.rho00 - std::expm1(-gamma1 * t) * rho.rho11;
    out.rho11 = decay * rho.rho11;
    out.rho01 = std::exp(-0.5 * gamma1 * t) * rho.rho01;
    return out;
}

DensityMatrix2 apply_phase_damping(const DensityMatrix2& rho, double gamma2_star, double t) {
    require_non_negative(gamma2_star, "gamma2_star");
    require_non_negative(t, "t");
    DensityMatrix2 out = rho;
    out.rho01 = std::exp(-gamma2_star * t) * rho.rho01;
    return out;
}

DensityMatrix2 apply_waveguide_channel(const DensityMatrix2& rho, const ChannelParams& params,
                                       double length) {
    params.validate();
    require_non_negative(length, "length");
    const double t = length / params.group_velocity;
    return apply_phase_damping(apply_amplitude_damping(rho, params.gamma1, t), params.gamma2_star,
                               t);
}

double gamma1_from_propagation(double propagation_length, double group_velocity) {
    require_positive(propagation_length, "propagation_length");
    require_positive(group_velocity, "group_velocity");
    return group_velocity / propagation_length;
}

double dimensionless_damping(double gamma, double length, double group_velocity) {
    require_non_negative(gamma, "gamma");
    require_non_negative(length, "length");
    require_positive(group_velocity, "group_velocity");
    return gamma * length / group_velocity;
}

double t2_from(double t1, double t2_star) {
    require_positive(t1, "t1");
    require_positive(t2_star, "t2_star");
    return 1.0 / (0.5 / t1 + 1.0 / t2_star);
}

DampingTimes damping_times(double t1, double t2_star) {
    return DampingTimes{t1, t2_star, t2_from(t1, t2_star)};
}

}  // namespace spp
