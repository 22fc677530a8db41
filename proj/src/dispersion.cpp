#include "spp/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "spp/error.hpp"

namespace spp {

namespace {

void require_positive(double value, const char* name) {
    if (!(value > 0.0)) {
        throw DomainError(std::string("dispersion: ") + name + " must be positive, got " +
                          std::to_string(value));
    }
}

}  // namespace

void DispersionTable::validate() const {
    if (samples.size() < 3) {
        throw InsufficientDataError("dispersion: table needs at least 3 samples, got " +
                                    std::to_string(samples.size()));
    }
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!(samples[i].group_velocity > 0.0)) {
            throw DomainError("dispersion: non-positive group velocity at row " +
                              std::to_string(i + 1));
        }
        if (i > 0 && !(samples[i].omega > samples[i - 1].omega)) {
            throw DomainError("dispersion: omega must be strictly increasing (row " +
                              std::to_string(i + 1) + ")");
        }
    }
    if (omega0 < samples.front().omega || omega0 > samples.back().omega) {
        throw RangeError("dispersion: omega0 outside the tabulated range");
    }
}

DispersionTable load_dispersion_table(const std::filesystem::path& path, double omega0) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open dispersion table " + path.string());
    }
    DispersionTable table;
    table.omega0 = omega0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line_no == 1) {
            if (line != "omega_rad_s,vg_m_s") {
                throw IoError(path.string() + ":1: expected header omega_rad_s,vg_m_s");
            }
            continue;
        }
        if (line.empty()) {
            continue;
        }
        std::istringstream row(line);
        DispersionSample s;
        char comma = 0;
        if (!(row >> s.omega >> comma >> s.group_velocity) || comma != ',') {
            throw IoError(path.string() + ":" + std::to_string(line_no) + ": malformed row");
        }
        table.samples.push_back(s);
    }
    table.validate();
    return table;
}

double omega_from_wavelength(double lambda0) {
    require_positive(lambda0, "lambda0");
    return 2.0 * std::numbers::pi * kSpeedOfLight / lambda0;
}

double gvd_coefficient(const DispersionTable& table) {
    table.validate();
    const auto& s = table.samples;
    const auto upper = std::lower_bound(s.begin(), s.end(), table.omega0,
                                        [](const DispersionSample& a, double w) {
                                            return a.omega < w;
                                        });
    std::size_t nearest = static_cast<std::size_t>(upper - s.begin());
    if (nearest == s.size() ||
        (nearest > 0 && table.omega0 - s[nearest - 1].omega < s[nearest].omega - table.omega0)) {
        --nearest;
    }
    const std::size_t c = std::clamp<std::size_t>(nearest, 1, s.size() - 2);

    // Derivative of the quadratic through three points, evaluated at omega0.
    const double x0 = s[c - 1].omega, x1 = s[c].omega, x2 = s[c + 1].omega;
    const double f0 = 1.0 / s[c - 1].group_velocity;
    const double f1 = 1.0 / s[c].group_velocity;
    const double f2 = 1.0 / s[c + 1].group_velocity;
    const double w = table.omega0;
    return f0 * ((w - x1) + (w - x2)) / ((x0 - x1) * (x0 - x2)) +
           f1 * ((w - x0) + (w - x2)) / ((x1 - x0) * (x1 - x2)) +
           f2 * ((w - x0) + (w - x1)) / ((x2 - x0) * (x2 - x1));
}

double sigma_omega_from_fwhm(double delta_lambda, double lambda0) {
    require_positive(delta_lambda, "delta_lambda");
    require_positive(lambda0, "lambda0");
    const double delta_omega = 2.0 * std::numbers::pi * kSpeedOfLight * delta_lambda /
                               (lambda0 * lambda0);
    return delta_omega / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
}

WavepacketSpec WavepacketSpec::from_fwhm(double delta_lambda, double lambda0) {
    WavepacketSpec spec;
    spec.sigma_omega = sigma_omega_from_fwhm(delta_lambda, lambda0);
    spec.sigma_t0 = 0.5 / spec.sigma_omega;
    spec.lambda0 = lambda0;
    return spec;
}

void WavepacketSpec::validate() const {
    require_positive(sigma_omega, "sigma_omega");
    require_positive(lambda0, "lambda0");
    if (std::abs(sigma_t0 * sigma_omega - 0.5) > 1e-12) {
        throw DomainError("dispersion: sigma_t0 * sigma_omega must equal 1/2");
    }
}

double temporal_spread(double sigma_t0, double length, double gvd) {
    require_positive(sigma_t0, "sigma_t0");
    if (!(length >= 0.0)) {
        throw DomainError("dispersion: length must be non-negative");
    }
    const double chirp = length * gvd / (2.0 * sigma_t0);
    return std::sqrt(sigma_t0 * sigma_t0 + chirp * chirp);
}

double mode_overlap(double sigma_omega_a, double sigma_omega_b) {
    require_positive(sigma_omega_a, "sigma_omega_a");
    require_positive(sigma_omega_b, "sigma_omega_b");
    const double a = sigma_omega_a, b = sigma_omega_b;
    return std::sqrt(2.0 * a * b / (a * a + b * b));
}

DispersionCheck dispersion_overlap(double delta_lambda, double lambda0, double length,
                                   double gvd) {
    const WavepacketSpec packet = WavepacketSpec::from_fwhm(delta_lambda, lambda0);
    DispersionCheck check;
    check.sigma_omega = packet.sigma_omega;
    check.sigma_t0 = packet.sigma_t0;
    check.sigma_t = temporal_spread(packet.sigma_t0, length, gvd);
    check.sigma_omega_t = 0.5 / check.sigma_t;
    check.overlap = mode_overlap(check.sigma_omega, check.sigma_omega_t);
    return check;
}

}  // namespace spp
