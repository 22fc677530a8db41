#pragma once

// CSV files for scans and the JSON records emitted for fits.
//
//   decay   length_um,counts,integration_s
//   fringe  x_nm,counts,sigma
//   g2      n_herald,n_ab,n_ac,n_abc,window_ns   (single row)
//
// Counts are written as integers when integral. JSON floats carry 9
// significant digits; non-finite values are written as null.

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "spp/estimate.hpp"
#include "spp/simkit.hpp"

namespace spp {

void write_decay_csv(const std::filesystem::path& path, const DecayScan& scan);
DecayScan read_decay_csv(const std::filesystem::path& path, Regime regime);

void write_fringe_csv(const std::filesystem::path& path, const FringeScan& scan);
/// Reads the points; waveguide, knowns and wavelength come from elsewhere.
std::vector<FringePoint> read_fringe_csv(const std::filesystem::path& path);

void write_g2_csv(const std::filesystem::path& path, const G2Counts& counts);
G2Counts read_g2_csv(const std::filesystem::path& path);

/// Rounds to 9 significant digits; inf/nan become null.
nlohmann::json json_number(double value);

nlohmann::json to_json(const DecayFit& fit);
nlohmann::json to_json(const LineFit& fit);
nlohmann::json to_json(const DecoherenceSummary& summary);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace spp
