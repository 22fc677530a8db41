#include "spp/scan_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "spp/error.hpp"

namespace spp {

using nlohmann::json;

namespace {

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string format_count(double counts) {
    if (counts == std::floor(counts) && std::abs(counts) < 9e15) {
        return fmt("%.0f", counts);
    }
    return fmt("%.17g", counts);
}

std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    return out;
}

// Reads a CSV with the given header; returns rows of numeric fields.
std::vector<std::vector<double>> read_csv(const std::filesystem::path& path,
                                          const std::string& header, std::size_t columns) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line_no == 1) {
            if (line != header) {
                throw IoError(path.string() + ":1: expected header '" + header + "'");
            }
            continue;
        }
        if (line.empty()) {
            continue;
        }
        std::vector<double> row;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) {
            char* end = nullptr;
            const double v = std::strtod(field.c_str(), &end);
            if (field.empty() || end != field.c_str() + field.size()) {
                throw IoError(path.string() + ":" + std::to_string(line_no) +
                              ": not a number: '" + field + "'");
            }
            row.push_back(v);
        }
        if (row.size() != columns) {
            throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                          std::to_string(columns) + " fields");
        }
        rows.push_back(std::move(row));
    }
    if (line_no == 0) {
        throw IoError(path.string() + ": empty file");
    }
    return rows;
}

}  // namespace

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out = open_for_write(path);
    out << text;
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

void write_decay_csv(const std::filesystem::path& path, const DecayScan& scan) {
    std::ostringstream out;
    out << "length_um,counts,integration_s\n";
    for (const DecayPoint& p : scan.points) {
        out << fmt("%.9g", p.length * 1e6) << ',' << format_count(p.counts) << ','
            << fmt("%.9g", p.integration_time) << '\n';
    }
    write_text_file(path, out.str());
}

DecayScan read_decay_csv(const std::filesystem::path& path, Regime regime) {
    DecayScan scan;
    scan.regime = regime;
    for (const auto& row : read_csv(path, "length_um,counts,integration_s", 3)) {
        scan.points.push_back({row[0] * 1e-6, row[1], row[2]});
    }
    try {
        scan.validate();
    } catch (const DomainError& e) {
        throw IoError(path.string() + ": " + e.what());
    }
    return scan;
}

void write_fringe_csv(const std::filesystem::path& path, const FringeScan& scan) {
    std::ostringstream out;
    out << "x_nm,counts,sigma\n";
    for (const FringePoint& p : scan.points) {
        out << fmt("%.9g", p.x * 1e9) << ',' << format_count(p.counts) << ','
            << fmt("%.9g", p.sigma) << '\n';
    }
    write_text_file(path, out.str());
}

std::vector<FringePoint> read_fringe_csv(const std::filesystem::path& path) {
    std::vector<FringePoint> points;
    for (const auto& row : read_csv(path, "x_nm,counts,sigma", 3)) {
        points.push_back({row[0] * 1e-9, row[1], row[2]});
    }
    return points;
}

void write_g2_csv(const std::filesystem::path& path, const G2Counts& c) {
    std::ostringstream out;
    out << "n_herald,n_ab,n_ac,n_abc,window_ns\n"
        << c.n_herald << ',' << c.n_ab << ',' << c.n_ac << ',' << c.n_abc << ','
        << fmt("%.9g", c.window * 1e9) << '\n';
    write_text_file(path, out.str());
}

G2Counts read_g2_csv(const std::filesystem::path& path) {
    const auto rows = read_csv(path, "n_herald,n_ab,n_ac,n_abc,window_ns", 5);
    if (rows.size() != 1) {
        throw IoError(path.string() + ": expected exactly one data row");
    }
    const auto& r = rows.front();
    for (std::size_t i = 0; i < 4; ++i) {
        if (r[i] < 0.0 || r[i] != std::floor(r[i])) {
            throw IoError(path.string() + ":2: counts must be non-negative integers");
        }
    }
    G2Counts c;
    c.n_herald = static_cast<std::uint64_t>(r[0]);
    c.n_ab = static_cast<std::uint64_t>(r[1]);
    c.n_ac = static_cast<std::uint64_t>(r[2]);
    c.n_abc = static_cast<std::uint64_t>(r[3]);
    c.window = r[4] * 1e-9;
    try {
        c.validate();
    } catch (const DomainError& e) {
        throw IoError(path.string() + ": " + e.what());
    }
    return c;
}

json json_number(double value) {
    if (!std::isfinite(value)) {
        return nullptr;
    }
    return std::strtod(fmt("%.9g", value).c_str(), nullptr);
}

json to_json(const DecayFit& fit) {
    return json{
        {"L_um", json_number(fit.propagation_length.value * 1e6)},
        {"L_um_std", json_number(fit.propagation_length.std * 1e6)},
        {"C0_cps", json_number(fit.amplitude.value)},
        {"C0_cps_std", json_number(fit.amplitude.std)},
        {"gamma1_s", json_number(fit.gamma1.value)},
        {"gamma1_s_std", json_number(fit.gamma1.std)},
        {"T1_s", json_number(fit.t1.value)},
        {"T1_s_std", json_number(fit.t1.std)},
        {"chi2", json_number(fit.goodness)},
    };
}

json to_json(const LineFit& fit) {
    json j{
        {"slope_per_um", json_number(fit.slope.value * 1e-6)},
        {"slope_per_um_std", json_number(fit.slope.std * 1e-6)},
        {"intercept", json_number(fit.intercept.value)},
        {"intercept_std", json_number(fit.intercept.std)},
        {"slope_intercept_cov_per_um", json_number(fit.covariance(0, 1) * 1e-6)},
        {"chi2", json_number(fit.chi2)},
    };
    j["slope_per_um_std_scatter"] =
        fit.slope_std_scatter ? json_number(*fit.slope_std_scatter * 1e-6) : json(nullptr);
    j["intercept_std_scatter"] =
        fit.intercept_std_scatter ? json_number(*fit.intercept_std_scatter) : json(nullptr);
    return j;
}

json to_json(const DecoherenceSummary& s) {
    return json{
        {"regime", std::string(to_string(s.regime))},
        {"gamma1_s", json_number(s.gamma1.value)},
        {"gamma1_s_std", json_number(s.gamma1.std)},
        {"gamma2_star_s", json_number(s.gamma2_star.value)},
        {"gamma2_star_s_std", json_number(s.gamma2_star.std)},
        {"gamma2_s", json_number(s.gamma2.value)},
        {"gamma2_s_std", json_number(s.gamma2.std)},
        {"T1_s", json_number(s.t1.value)},
        {"T1_s_std", json_number(s.t1.std)},
        {"T2_star_s", json_number(s.t2_star.value)},
        {"T2_star_s_std", json_number(s.t2_star.std)},
        {"T2_s", json_number(s.t2.value)},
        {"T2_s_std", json_number(s.t2.std)},
    };
}

}  // namespace spp
