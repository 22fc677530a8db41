#include "spp/estimate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>

#include "spp/channels.hpp"
#include "spp/error.hpp"
#include "spp/least_squares.hpp"
#include "spp/rng.hpp"

namespace spp {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kMicron = 1e-6;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::optional<double> sample_std(std::span<const double> values, double mean) {
    if (values.size() < 2) {
        return std::nullopt;
    }
    double ss = 0.0;
    for (double v : values) {
        ss += (v - mean) * (v - mean);
    }
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double mean_of(std::span<const double> values) {
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    return sum / static_cast<double>(values.size());
}

}  // namespace

// ---------------------------------------------------------------------------
// Decay

DecayFit fit_exponential_decay(const DecayScan& scan, double group_velocity) {
    scan.validate();
    if (!(group_velocity > 0.0)) {
        throw DomainError("decay fit: group velocity must be positive");
    }
    const auto& pts = scan.points;
    if (pts.size() < 3) {
        throw InsufficientDataError("decay fit: need at least 3 lengths, got " +
                                    std::to_string(pts.size()));
    }

    // Work in microns and counts per unit integration time so both parameters
    // are O(1)-O(1e5) rather than O(1e-6).
    const auto n = static_cast<Eigen::Index>(pts.size());
    Eigen::VectorXd len(n), rate(n), weight(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const DecayPoint& p = pts[static_cast<std::size_t>(i)];
        len[i] = p.length / kMicron;
        rate[i] = p.counts / p.integration_time;
        // Poisson variance of counts, floored at one count.
        const double var_counts = std::max(p.counts, 1.0);
        weight[i] = p.integration_time / std::sqrt(var_counts);
    }

    // Seed from a log-linear fit over the non-zero points.
    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    int positive = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double counts = pts[static_cast<std::size_t>(i)].counts;
        if (counts <= 0.0) {
            continue;
        }
        ++positive;
        const double w = counts;
        const double y = std::log(rate[i]);
        sw += w;
        sx += w * len[i];
        sy += w * y;
        sxx += w * len[i] * len[i];
        sxy += w * len[i] * y;
    }
    if (positive < 2) {
        throw InsufficientDataError("decay fit: fewer than 2 lengths with non-zero counts");
    }
    const double det = sw * sxx - sx * sx;
    double slope = det > 0.0 ? (sw * sxy - sx * sy) / det : 0.0;
    const double span = len.maxCoeff() - len.minCoeff();
    if (!(slope < 0.0)) {
        slope = -1.0 / std::max(span, 1.0);
    }
    const double intercept = (sy - slope * sx) / sw;

    LeastSquaresProblem problem;
    problem.n_residuals = n;
    problem.lower = Eigen::Vector2d(0.0, 1e-9);
    problem.upper = Eigen::Vector2d(kInf, kInf);
    problem.residuals = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r) {
        for (Eigen::Index i = 0; i < n; ++i) {
            r[i] = (rate[i] - p[0] * std::exp(-len[i] / p[1])) * weight[i];
        }
    };
    problem.jacobian = [&](const Eigen::VectorXd& p, Eigen::MatrixXd& j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const double e = std::exp(-len[i] / p[1]);
            j(i, 0) = -e * weight[i];
            j(i, 1) = -p[0] * e * len[i] / (p[1] * p[1]) * weight[i];
        }
    };
    const LeastSquaresResult res =
        solve_least_squares(problem, Eigen::Vector2d(std::exp(intercept), -1.0 / slope));
    if (!res.converged) {
        std::ostringstream msg;
        msg << "decay fit did not converge after " << res.iterations
            << " iterations (L = " << res.params[1] << " um, cost = " << res.cost << ")";
        throw FitFailure(msg.str());
    }

    DecayFit fit;
    fit.propagation_length = {res.params[1] * kMicron, std::sqrt(res.covariance(1, 1)) * kMicron};
    fit.amplitude = {res.params[0], std::sqrt(res.covariance(0, 0))};
    const double L = fit.propagation_length.value;
    const double sigma_L = fit.propagation_length.std;
    fit.gamma1 = {gamma1_from_propagation(L, group_velocity), group_velocity * sigma_L / (L * L)};
    fit.t1 = {L / group_velocity, sigma_L / group_velocity};
    fit.goodness = res.cost;
    fit.iterations = res.iterations;
    return fit;
}

// ---------------------------------------------------------------------------
// Fringes

namespace {

struct FringeCoefficients {
    double offset;     // R e^-g1p + T e^-(gt1+g2p)
    double amplitude;  // 2 sqrt(RT) e^-(g1p+g2p+gt1)/2, before e^-Gamma_eff
};

FringeCoefficients coefficients(const FringeKnowns& k) {
    const FullMzi m{0.0, k.reflectance, k.transmittance, k.g1p, k.g2p, k.gt1, 0.0};
    const FringeTerms t = fringe_terms(m);
    return {t.offset, t.amplitude};
}

// Scan extent in periods, each point standing for one grid step.
double span_in_periods(const FringeScan& scan, double scale) {
    const auto& pts = scan.points;
    const double extent = pts.back().x - pts.front().x;
    const double step = extent / static_cast<double>(pts.size() - 1);
    return (extent + step) * scale / scan.wavelength;
}

}  // namespace

double fringe_counts_model(const FringeKnowns& known, double wavelength, double x,
                           double gamma_eff, double delta, double scale, double i_in) {
    const FringeCoefficients c = coefficients(known);
    const double theta = kTwoPi * scale * x / wavelength;
    return i_in * (c.offset + c.amplitude * std::exp(-gamma_eff) * std::cos(theta - delta));
}

double empirical_visibility(const FringeScan& scan, double scale) {
    const auto n = static_cast<Eigen::Index>(scan.points.size());
    if (n < 3) {
        throw InsufficientDataError("visibility: need at least 3 points");
    }
    Eigen::MatrixXd design(n, 3);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const FringePoint& p = scan.points[static_cast<std::size_t>(i)];
        const double theta = kTwoPi * scale * p.x / scan.wavelength;
        design(i, 0) = 1.0;
        design(i, 1) = std::cos(theta);
        design(i, 2) = std::sin(theta);
        y[i] = p.counts;
    }
    const Eigen::Vector3d coef = design.colPivHouseholderQr().solve(y);
    if (!(coef[0] > 0.0)) {
        throw DegenerateModelError("visibility: non-positive mean count level");
    }
    return std::hypot(coef[1], coef[2]) / coef[0];
}

FringeFit fit_fringe(const FringeScan& scan, const FringeFitOptions& options) {
    scan.validate();
    const auto& pts = scan.points;
    if (pts.size() < 8) {
        throw InsufficientDataError("fringe fit: need at least 8 points, got " +
                                    std::to_string(pts.size()));
    }
    if (span_in_periods(scan, options.initial_scale) < options.min_periods - 1e-9) {
        throw InsufficientDataError("fringe fit: scan covers less than one oscillation period");
    }
    const FringeCoefficients coef = coefficients(scan.known);
    if (!(coef.amplitude > 0.0) || !(coef.offset > 0.0)) {
        throw DegenerateModelError("fringe fit: known settings leave no interference term");
    }

    const auto n = static_cast<Eigen::Index>(pts.size());
    Eigen::VectorXd u(n), y(n), inv_sigma(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const FringePoint& p = pts[static_cast<std::size_t>(i)];
        u[i] = kTwoPi * p.x / scan.wavelength;
        y[i] = p.counts;
        inv_sigma[i] = 1.0 / std::max(p.sigma, 1.0);
    }

    // Parameters: Gamma_eff, delta, s, I_in.
    LeastSquaresProblem problem;
    problem.n_residuals = n;
    problem.lower = Eigen::Vector4d(0.0, -kInf, 1e-3, 0.0);
    problem.upper = Eigen::Vector4d(kInf, kInf, kInf, kInf);
    problem.residuals = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r) {
        const double amp = coef.amplitude * std::exp(-p[0]);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double model = p[3] * (coef.offset + amp * std::cos(p[2] * u[i] - p[1]));
            r[i] = (y[i] - model) * inv_sigma[i];
        }
    };
    problem.jacobian = [&](const Eigen::VectorXd& p, Eigen::MatrixXd& j) {
        const double amp = coef.amplitude * std::exp(-p[0]);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double arg = p[2] * u[i] - p[1];
            const double c = std::cos(arg);
            const double s = std::sin(arg);
            j(i, 0) = p[3] * amp * c * inv_sigma[i];
            j(i, 1) = -p[3] * amp * s * inv_sigma[i];
            j(i, 2) = p[3] * amp * s * u[i] * inv_sigma[i];
            j(i, 3) = -(coef.offset + amp * c) * inv_sigma[i];
        }
    };

    // Starting amplitude and damping from the first-harmonic contrast.
    const double v_emp = empirical_visibility(scan, options.initial_scale);
    const double v_max = coef.amplitude / coef.offset;
    const double gamma0 = v_emp > 0.0 ? std::max(0.0, std::log(v_max / v_emp)) : 3.0;
    const double i_in0 = std::max(y.mean(), 1e-12) / coef.offset;

    std::optional<LeastSquaresResult> best;
    int converged = 0;
    std::ostringstream diagnostics;
    for (double delta0 : {0.0, 0.5 * std::numbers::pi, std::numbers::pi, 1.5 * std::numbers::pi}) {
        const LeastSquaresResult res = solve_least_squares(
            problem, Eigen::Vector4d(gamma0, delta0, options.initial_scale, i_in0));
        diagnostics << " [delta0=" << delta0 << " cost=" << res.cost
                    << " iter=" << res.iterations << (res.converged ? "" : " no-conv") << "]";
        if (!res.converged) {
            continue;
        }
        ++converged;
        if (!best || res.cost < best->cost) {
            best = res;
        }
    }
    if (!best) {
        throw FitFailure("fringe fit failed for waveguide '" + scan.waveguide.label +
                         "':" + diagnostics.str());
    }

    FringeFit fit;
    fit.gamma_eff = {best->params[0], std::sqrt(std::max(best->covariance(0, 0), 0.0))};
    fit.delta = wrap_phase(best->params[1]);
    fit.scale = best->params[2];
    fit.i_in = best->params[3];
    fit.goodness = best->cost;
    fit.at_boundary = best->at_bound[0];
    fit.converged_starts = converged;
    return fit;
}

MonteCarloSummary monte_carlo_fringe(const FringeScan& scan, std::size_t n_instances,
                                     std::uint64_t seed, unsigned threads,
                                     const FringeFitOptions& options) {
    if (n_instances == 0) {
        throw DomainError("monte carlo: need at least one instance");
    }
    scan.validate();
    const std::uint64_t stream = stream_id("mc/" + std::string(to_string(scan.regime)) + "/" +
                                           scan.waveguide.label);

    std::vector<double> values(n_instances, 0.0);
    std::vector<char> ok(n_instances, 0);
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < n_instances; i = next.fetch_add(1)) {
            Engine engine = make_engine(seed, stream, i);
            FringeScan instance = scan;
            for (FringePoint& p : instance.points) {
                p.counts = draw_poisson(engine, p.counts);
                p.sigma = std::sqrt(p.counts);
            }
            try {
                values[i] = fit_fringe(instance, options).gamma_eff.value;
                ok[i] = 1;
            } catch (const Error&) {
                ok[i] = 0;
            }
        }
    };

    unsigned n_threads = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, n_instances));
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 1; t < n_threads; ++t) {
            pool.emplace_back(worker);
        }
        worker();
    }

    MonteCarloSummary summary;
    for (std::size_t i = 0; i < n_instances; ++i) {
        if (ok[i]) {
            summary.instances.push_back(values[i]);
        } else {
            ++summary.failures;
        }
    }
    if (summary.failures * 10 > n_instances) {
        throw FitFailure("monte carlo: " + std::to_string(summary.failures) + " of " +
                         std::to_string(n_instances) + " instances failed to fit for waveguide '" +
                         scan.waveguide.label + "'");
    }
    summary.mean = mean_of(summary.instances);
    summary.std = sample_std(summary.instances, summary.mean);
    return summary;
}

WindowRefit fit_fringe_windows(const FringeScan& scan, double scale) {
    WindowRefit out;
    if (scan.points.size() < 2 || !(scale > 0.0)) {
        return out;
    }
    const double periods = span_in_periods(scan, scale);
    if (periods <= 2.0) {
        return out;
    }
    const double period = scan.wavelength / scale;
    // Allow ~1% slack so a fitted scale just under 1 does not drop a window.
    const auto n_windows = static_cast<std::size_t>(std::floor(periods + 0.01));
    const double x0 = scan.points.front().x;
    FringeFitOptions options;
    options.initial_scale = scale;
    options.min_periods = 0.98;
    for (std::size_t k = 0; k < n_windows; ++k) {
        FringeScan window = scan;
        window.points.clear();
        const double lo = x0 + static_cast<double>(k) * period;
        const double hi = lo + period;
        for (const FringePoint& p : scan.points) {
            if (p.x >= lo && p.x < hi) {
                window.points.push_back(p);
            }
        }
        try {
            out.gamma_eff.push_back(fit_fringe(window, options).gamma_eff.value);
        } catch (const InsufficientDataError&) {
            // A short trailing window is skipped.
        }
    }
    if (!out.gamma_eff.empty()) {
        out.std = sample_std(out.gamma_eff, mean_of(out.gamma_eff));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Gamma_eff(length) line

LineFit fit_gamma_eff_line(std::span<const LinePoint> points) {
    if (points.size() < 2) {
        throw DomainError("line fit: need at least 2 points");
    }
    const auto n = static_cast<Eigen::Index>(points.size());
    // Whitened design in microns: rows [1/s, x/s].
    Eigen::MatrixXd design(n, 2);
    Eigen::VectorXd rhs(n);
    bool distinct = false;
    for (Eigen::Index i = 0; i < n; ++i) {
        const LinePoint& p = points[static_cast<std::size_t>(i)];
        if (!(p.std > 0.0)) {
            throw DomainError("line fit: standard deviations must be positive");
        }
        if (p.length != points.front().length) {
            distinct = true;
        }
        design(i, 0) = p.length / kMicron / p.std;
        design(i, 1) = 1.0 / p.std;
        rhs[i] = p.gamma_eff / p.std;
    }
    if (!distinct) {
        throw DomainError("line fit: all points share one length");
    }

    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(design);
    const Eigen::Vector2d beta = qr.solve(rhs);
    const Eigen::Matrix2d r = qr.matrixQR().topRows(2).triangularView<Eigen::Upper>();
    const Eigen::Matrix2d r_inv = r.inverse();
    Eigen::Matrix2d cov_um = r_inv * r_inv.transpose();

    const Eigen::VectorXd resid = rhs - design * beta;

    LineFit fit;
    // Convert slope from per-micron to per-metre.
    const Eigen::Vector2d unit(1.0 / kMicron, 1.0);
    fit.covariance = unit.asDiagonal() * cov_um * unit.asDiagonal();
    fit.slope = {beta[0] / kMicron, std::sqrt(fit.covariance(0, 0))};
    fit.intercept = {beta[1], std::sqrt(fit.covariance(1, 1))};
    fit.chi2 = resid.squaredNorm();
    if (n > 2) {
        const double factor = std::sqrt(fit.chi2 / static_cast<double>(n - 2));
        fit.slope_std_scatter = fit.slope.std * factor;
        fit.intercept_std_scatter = fit.intercept.std * factor;
    }
    return fit;
}

// ---------------------------------------------------------------------------
// Summary

DecoherenceSummary summarize(const Measured& gamma1, const Measured& slope_per_m,
                             double group_velocity, Regime regime) {
    if (!(gamma1.value > 0.0) || !(group_velocity > 0.0)) {
        throw DomainError("summary: gamma1 and group velocity must be positive");
    }
    if (!(slope_per_m.value >= 0.0)) {
        throw DomainError("summary: pure phase damping slope must be non-negative");
    }
    if (!(gamma1.std >= 0.0) || !(slope_per_m.std >= 0.0)) {
        throw DomainError("summary: standard deviations must be non-negative");
    }

    DecoherenceSummary s;
    s.regime = regime;
    s.gamma1 = gamma1;
    s.gamma2_star = {slope_per_m.value * group_velocity, slope_per_m.std * group_velocity};
    s.t1 = {1.0 / gamma1.value, gamma1.std / (gamma1.value * gamma1.value)};
    if (s.gamma2_star.value > 0.0) {
        const double g = s.gamma2_star.value;
        s.t2_star = {1.0 / g, s.gamma2_star.std / (g * g)};
    } else {
        s.t2_star = {kInf, s.gamma2_star.std > 0.0 ? kInf : 0.0};
    }
    s.t2.value = t2_from(s.t1.value, s.t2_star.value);
    s.gamma2.value = 1.0 / s.t2.value;
    s.gamma2.std = std::hypot(0.5 * gamma1.std, s.gamma2_star.std);
    s.t2.std = s.gamma2.std / (s.gamma2.value * s.gamma2.value);
    return s;
}

}  // namespace spp
