#pragma once

#include <cstdint>
#include <random>

namespace htsim {

// Reproducible random stream handle. A (seed, stream) pair always produces
// the same engine state, so every sampler call is a pure function of
// (seed, stream, n). Use distinct stream ids for independent draws.
struct RngStream {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    // Derived stream for sub-tasks (per grid point, per user, ...).
    RngStream substream(std::uint64_t k) const {
        // splitmix64 step keeps substreams well separated
        std::uint64_t z = stream + 0x9e3779b97f4a7c15ULL * (k + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return RngStream{seed, z ^ (z >> 31)};
    }

    std::mt19937_64 make_engine() const {
        std::seed_seq seq{
            static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
            static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
        return std::mt19937_64(seq);
    }
};

} // namespace htsim
