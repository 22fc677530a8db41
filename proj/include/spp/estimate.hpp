#pragma once

// Parameter extraction: cut-back decay -> L and Gamma1, fringe fits with
// Monte-Carlo resampling -> Gamma_eff per waveguide, a weighted line through
// Gamma_eff(length) -> Gamma2*/v_g and Gamma_int, and the final T1/T2*/T2
// summary.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "spp/simkit.hpp"

namespace spp {

struct Measured {
    double value = 0.0;
    double std = 0.0;
};

struct DecayFit {
    Measured propagation_length;  // m
    Measured amplitude;           // count rate at zero length, cps
    Measured gamma1;              // s^-1
    Measured t1;                  // s
    double goodness = 0.0;        // weighted sum of squared residuals
    int iterations = 0;
};

/// Weighted fit of counts = C0 exp(-length / L), weights 1 / max(counts, 1).
DecayFit fit_exponential_decay(const DecayScan& scan, double group_velocity);

struct FringeFitOptions {
    double initial_scale = 1.0;
    /// Minimum scan extent, in fringe periods at initial_scale. Each point
    /// counts for one grid step, so N points at spacing lambda0/N span one period.
    double min_periods = 1.0;
};

struct FringeFit {
    Measured gamma_eff;
    double delta = 0.0;  // wrapped into [0, 2 pi)
    double scale = 1.0;
    double i_in = 0.0;
    double goodness = 0.0;
    /// Gamma_eff was held at its lower bound of zero.
    bool at_boundary = false;
    int converged_starts = 0;
};

/// Weighted nonlinear fit of counts = I_in * p_Full(2 pi s x / lambda0) with
/// Gamma_eff, delta, s and I_in free and the scan's known interferometer
/// settings fixed. Restarts from delta = 0, pi/2, pi, 3pi/2 and keeps the best.
FringeFit fit_fringe(const FringeScan& scan, const FringeFitOptions& options = {});

/// Fringe model with the scan's knowns and the given free parameters.
double fringe_counts_model(const FringeKnowns& known, double wavelength, double x,
                           double gamma_eff, double delta, double scale, double i_in);

struct MonteCarloSummary {
    double mean = 0.0;
    std::optional<double> std;  // absent for a single instance
    std::vector<double> instances;
    std::size_t failures = 0;
};

/// Refits `n_instances` Poisson redraws of the scan (mean = measured counts).
/// Instance i draws from its own RNG stream, so results do not depend on
/// `threads` (0 = hardware concurrency).
MonteCarloSummary monte_carlo_fringe(const FringeScan& scan, std::size_t n_instances,
                                     std::uint64_t seed, unsigned threads = 0,
                                     const FringeFitOptions& options = {});

struct WindowRefit {
    std::vector<double> gamma_eff;
    std::optional<double> std;
};

/// Fits disjoint one-period windows when the scan covers more than two
/// periods; otherwise returns an empty result.
WindowRefit fit_fringe_windows(const FringeScan& scan, double scale);

/// Contrast of the first spatial harmonic at stage scale `scale`, from an
/// unweighted linear fit of counts on {1, cos, sin}.
double empirical_visibility(const FringeScan& scan, double scale);

struct LinePoint {
    double length = 0.0;  // m
    double gamma_eff = 0.0;
    double std = 0.0;
};

struct LineFit {
    Measured slope;      // per metre (Gamma2* / v_g)
    Measured intercept;  // Gamma_int
    Eigen::Matrix2d covariance;  // (slope, intercept), slope in per-metre units
    double chi2 = 0.0;
    /// Stds rescaled by chi2 / (n - 2); absent for two points.
    std::optional<double> slope_std_scatter;
    std::optional<double> intercept_std_scatter;
};

/// Weighted linear least squares with weights 1 / std^2.
LineFit fit_gamma_eff_line(std::span<const LinePoint> points);

struct DecoherenceSummary {
    Regime regime = Regime::quantum;
    Measured gamma1;
    Measured gamma2_star;
    Measured gamma2;
    Measured t1;
    Measured t2_star;  // +inf when gamma2_star is zero
    Measured t2;
};

/// Gamma2* = slope * v_g, T2 from T1 and T2*, first-order error propagation.
DecoherenceSummary summarize(const Measured& gamma1, const Measured& slope_per_m,
                             double group_velocity, Regime regime);

}  // namespace spp
