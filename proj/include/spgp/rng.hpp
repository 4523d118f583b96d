#pragma once

#include <cstdint>

namespace spgp {

/// Deterministic seeded generator: SplitMix64 (Steele, Lea, Flood 2014).
/// state' = state + 0x9E3779B97F4A7C15; output mixes with two xor-multiply rounds.
/// uniform() maps the top 53 bits to [0, 1). Same seed gives the same sequence,
/// bit-exact, on every platform; no libstdc++ distribution machinery is involved.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    std::uint64_t state() const { return state_; }

private:
    std::uint64_t state_;
};

}  // namespace spgp
