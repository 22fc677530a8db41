#include "spp/rng.hpp"

#include "spp/error.hpp"

namespace spp {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    return splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ index);
}

std::uint64_t stream_id(std::string_view name) {
    // FNV-1a
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : name) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

double draw_poisson(Engine& engine, double mean) {
    if (!(mean >= 0.0)) {
        throw DomainError("poisson mean must be non-negative");
    }
    if (mean == 0.0) {
        return 0.0;
    }
    std::poisson_distribution<long long> dist(mean);
    return static_cast<double>(dist(engine));
}

}  // namespace spp
