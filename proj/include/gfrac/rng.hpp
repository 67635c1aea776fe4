#ifndef GFRAC_RNG_HPP
#define GFRAC_RNG_HPP

#include <array>
#include <cstdint>

namespace gfrac {

// Philox 4x32-10 counter-based generator (Salmon et al., SC'11). Stateless:
// every block is a pure function of (counter, key), so paths and steps can be
// sampled in any order and in parallel with bitwise-reproducible results.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Standard normal draws addressed by (seed, path, step, index).
class CounterNormals {
public:
    CounterNormals(std::uint64_t seed, std::uint64_t path)
        : seed_(seed), path_(path) {}

    /// idx-th N(0,1) draw for the given step; deterministic in all arguments.
    double normal(std::uint32_t step, std::uint32_t idx) const;

private:
    std::uint64_t seed_;
    std::uint64_t path_;
};

} // namespace gfrac

#endif
