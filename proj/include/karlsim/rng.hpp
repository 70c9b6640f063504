#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string_view>

/* Deterministic random number generation. Every stochastic quantity in the
 * simulator draws from a Rng seeded through derive_stream(), so a module's
 * draw sequence depends only on the master seed and its own stream name,
 * never on evaluation order elsewhere. std::normal_distribution is avoided
 * on purpose: its output differs between standard library implementations,
 * which would break byte-identical reports across toolchains. */

namespace karlsim::rng {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/* FNV-1a over the stream name, mixed with the master seed. Distinct names
 * give independent streams for the same master seed. */
inline std::uint64_t derive_stream(std::uint64_t master_seed, std::string_view stream_name) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : stream_name) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    std::uint64_t s = master_seed ^ h;
    return splitmix64(s);
}

/* xoshiro256++ (Blackman/Vigna), seeded via splitmix64. */
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : state_) w = splitmix64(sm);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /* Uniform in [0, 1), 53-bit resolution. */
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /* Box-Muller. Draws exactly two uniforms per call; the spare is
     * discarded so the draw count per call is fixed. */
    double gauss(double mean, double stddev) {
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * r * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::array<std::uint64_t, 4> state_{};
};

}  // namespace karlsim::rng
