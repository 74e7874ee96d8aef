#pragma once

#include <cstdint>

namespace lrdseq {

// SplitMix64: a counter-based 64-bit generator. The state walks the
// counter seed, seed+GAMMA, seed+2*GAMMA, ... and each output is an
// avalanche of the counter, so output i is a pure function of
// (seed, i). Constants are the published ones:
//   GAMMA = 0x9E3779B97F4A7C15 (golden ratio * 2^64)
//   mix:   z ^= z>>30; z *= 0xBF58476D1CE4E5B9;
//          z ^= z>>27; z *= 0x94D049BB133111EB; z ^= z>>31;
class SplitMix64 {
public:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ULL;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t next() { return mix(state_ += kGamma); }

    // Uniform double in [0, 1), 53 random bits.
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

// Per-replication seed derivation. Bit-exact contract:
//   seed_r = SplitMix64::mix(master + (r + 1) * GAMMA)
// Distinct replication indices land on distinct counter values, so the
// derived streams never collide for r < 2^64 - 1.
inline std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t replication) {
    return SplitMix64::mix(master_seed + (replication + 1) * SplitMix64::kGamma);
}

// Standard normal variates via the Marsaglia polar method on a SplitMix64
// stream. The pair-rejection loop consumes a data-dependent number of
// uniforms; the sequence is still a pure function of the seed.
class NormalSampler {
public:
    explicit NormalSampler(std::uint64_t seed) : gen_(seed) {}

    double next();

private:
    SplitMix64 gen_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

} // namespace lrdseq
