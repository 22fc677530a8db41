#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace spp {

/// Counter-based seed derivation: every (seed, stream, index) triple gets its
/// own engine, so draws do not depend on evaluation order or thread count.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

/// Stable 64-bit id for a named stream ("decay/quantum", "mc/wg2", ...).
std::uint64_t stream_id(std::string_view name);

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    return Engine(derive_seed(seed, stream, index));
}

/// Poisson draw that accepts a zero mean.
double draw_poisson(Engine& engine, double mean);

}  // namespace spp
