#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace ogsnet {

// Counter-based RNG (Philox-4x32, 10 rounds). Every random number in the
// toolkit is a pure function of (seed, counter), so parallel consumers can
// draw from disjoint counter ranges and reproduce results bit-for-bit at
// any worker count.
struct Philox4x32 {
    static constexpr std::uint32_t kMult0 = 0xD2511F53u;
    static constexpr std::uint32_t kMult1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                              std::array<std::uint32_t, 2> key) {
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = std::uint64_t(kMult0) * ctr[0];
            const std::uint64_t p1 = std::uint64_t(kMult1) * ctr[2];
            ctr = {std::uint32_t(p1 >> 32) ^ ctr[1] ^ key[0],
                   std::uint32_t(p1),
                   std::uint32_t(p0 >> 32) ^ ctr[3] ^ key[1],
                   std::uint32_t(p0)};
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        return ctr;
    }
};

// Domain tags keep independent random streams disjoint in counter space.
enum class RandomDomain : std::uint32_t {
    dg_sampler  = 0xD6000001u,
    synth_field = 0x5F000002u,
    test        = 0x7E570003u,
};

// Uniform double in (0, 1] from 64 bits (53-bit mantissa, never 0 so it is
// safe under log()).
inline double uniform_open_closed(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = (std::uint64_t(hi) << 32) | lo;
    return double((bits >> 11) + 1) * 0x1.0p-53;
}

// Two standard normal deviates from one Philox block via Box-Muller.
inline void normal_pair(std::uint64_t seed, RandomDomain domain,
                        std::uint64_t index, std::uint32_t subindex,
                        double& z0, double& z1) {
    const std::array<std::uint32_t, 4> ctr = {
        std::uint32_t(index), std::uint32_t(index >> 32), subindex,
        static_cast<std::uint32_t>(domain)};
    const std::array<std::uint32_t, 2> key = {std::uint32_t(seed),
                                              std::uint32_t(seed >> 32)};
    const auto out = Philox4x32::block(ctr, key);
    const double u1 = uniform_open_closed(out[0], out[1]);
    const double u2 = uniform_open_closed(out[2], out[3]);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * 3.14159265358979323846 * u2;
    z0 = radius * std::cos(angle);
    z1 = radius * std::sin(angle);
}

}  // namespace ogsnet
