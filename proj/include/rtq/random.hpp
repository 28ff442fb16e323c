#pragma once

#include <cstdint>
#include <random>

namespace rtq {

/// Stateless 64-bit mixer used to derive independent stream seeds from a
/// master seed. Two different (seed, salt) inputs give unrelated outputs.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// One deterministic random stream. Identical seed + call sequence gives an
/// identical variate sequence on every platform we target.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : gen_(seed) {}

    /// Uniform draw in the open interval (0, 1); never returns 0 or 1, so
    /// log() and strictly positive supports are safe.
    double next_unit() {
        const std::uint64_t bits = gen_() >> 11; // top 53 bits
        return (static_cast<double>(bits) + 0.5) * 0x1p-53;
    }

    std::uint64_t next_u64() { return gen_(); }

private:
    std::mt19937_64 gen_;
};

/// Seeds for the three independent per-trace streams. Deriving all three from
/// one master seed keeps traces reproducible while guaranteeing that changing
/// one distribution spec never perturbs the other two sequences.
struct SeedTriple {
    std::uint64_t arrival = 0;
    std::uint64_t service = 0;
    std::uint64_t deadline = 0;

    static SeedTriple from_master(std::uint64_t master) {
        return SeedTriple{mix_seed(master, 0x61), mix_seed(master, 0x73),
                          mix_seed(master, 0x64)};
    }
};

} // namespace rtq
