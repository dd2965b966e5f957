#pragma once

#include <cstdint>
#include <random>

namespace lsx {

/// Identifies one pseudo-random substream: (root seed, stream index, batch index).
struct SeedLineage {
    std::uint64_t root = 0;
    std::uint64_t stream = 0;
    std::uint64_t batch = 0;

    friend bool operator==(const SeedLineage&, const SeedLineage&) = default;
};

using Rng = std::mt19937_64;

inline Rng make_rng(const SeedLineage& s) {
    std::seed_seq seq{static_cast<std::uint32_t>(s.root), static_cast<std::uint32_t>(s.root >> 32),
                      static_cast<std::uint32_t>(s.stream), static_cast<std::uint32_t>(s.stream >> 32),
                      static_cast<std::uint32_t>(s.batch), static_cast<std::uint32_t>(s.batch >> 32)};
    return Rng(seq);
}

}  // namespace lsx
