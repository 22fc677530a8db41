#pragma once

// Single-excitation density matrices and the amplitude / pure phase damping
// maps that act on them while an SPP propagates along a waveguide.

#include <complex>
#include <limits>

namespace spp {

inline constexpr double kStateTolerance = 1e-12;
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// 2x2 density matrix on the {|0>, |1>} number basis. rho10 is the conjugate
/// of rho01 and is not stored.
struct DensityMatrix2 {
    double rho00 = 1.0;
    double rho11 = 0.0;
    std::complex<double> rho01{0.0, 0.0};

    std::complex<double> rho10() const { return std::conj(rho01); }
    double trace() const { return rho00 + rho11; }

    /// Unit trace, non-negative populations and |rho01|^2 <= rho00 * rho11,
    /// each within `tol`.
    bool is_valid(double tol = kStateTolerance) const;
};

/// Ground-truth damping rates (s^-1) and group velocity (m/s) of the SPP mode.
struct ChannelParams {
    double gamma1 = 0.0;
    double gamma2_star = 0.0;
    double group_velocity = 1.0;

    void validate() const;
};

/// T1, T2* and T2 in seconds. T2* may be infinite (no pure phase damping).
struct DampingTimes {
    double t1 = 0.0;
    double t2_star = kInfinity;
    double t2 = 0.0;
};

DensityMatrix2 apply_amplitude_damping(const DensityMatrix2& rho, double gamma1, double t);
DensityMatrix2 apply_phase_damping(const DensityMatrix2& rho, double gamma2_star, double t);

/// Amplitude and pure phase damping over a waveguide of `length` metres,
/// with the propagation time length / v_g.
DensityMatrix2 apply_waveguide_channel(const DensityMatrix2& rho, const ChannelParams& params,
                                       double length);

/// Gamma1 = v_g / L.
double gamma1_from_propagation(double propagation_length, double group_velocity);

/// Gamma * length / v_g. For Gamma1 this is length / L.
double dimensionless_damping(double gamma, double length, double group_velocity);

/// 1/T2 = 1/(2 T1) + 1/T2*. `t2_star` may be +inf.
double t2_from(double t1, double t2_star);

DampingTimes damping_times(double t1, double t2_star);

}  // namespace spp
