#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace seqgini {

namespace detail {

// SplitMix64 finalizer (Stafford mix13). Full avalanche on 64 bits.
inline constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
}

}  // namespace detail

// Domain tags keep the seed-derivation schemes of the different study kinds
// disjoint: no stream seed is ever reused across replications, batches, or
// study types for a fixed base seed.
namespace seed_domain {
inline constexpr std::uint64_t study = 0x73747564790a0a01ULL;
inline constexpr std::uint64_t batch = 0x62617463680a0a02ULL;
inline constexpr std::uint64_t fixed_n = 0x666978656e0a0a03ULL;
inline constexpr std::uint64_t tables = 0x7461626c650a0a04ULL;
}  // namespace seed_domain

// Derive a stream seed from a base seed and a tuple of indices by chaining
// the mix64 avalanche over every word. Distinct tuples give distinct streams.
inline constexpr std::uint64_t derive_seed(std::uint64_t base,
                                           std::initializer_list<std::uint64_t> keys) noexcept {
    std::uint64_t s = detail::mix64(base);
    for (std::uint64_t k : keys) s = detail::mix64(s ^ detail::mix64(k));
    return s;
}

// xoshiro256++ with explicit, platform-independent distribution transforms.
// One instance per replication stream; never shared across threads.
class rng_stream {
  public:
    explicit rng_stream(std::uint64_t seed) noexcept {
        // Recommended seeding: fill state with a SplitMix64 sequence.
        std::uint64_t sm = seed;
        for (auto& word : state_) {
            sm += 0x9e3779b97f4a7c15ULL;
            word = detail::mix64(sm);
        }
    }

    std::uint64_t next_u64() noexcept {
        const std::uint64_t result = detail::rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = detail::rotl(state_[3], 45);
        return result;
    }

    // Uniform on the open interval (0, 1); never returns 0 or 1, so log() of
    // the result is always finite.
    double uniform_open() noexcept {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double exponential(double rate) noexcept {
        return -std::log(uniform_open()) / rate;
    }

    // Box-Muller, cosine branch only: exactly two uniforms per call.
    double standard_normal() noexcept {
        const double u1 = uniform_open();
        const double u2 = uniform_open();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    double lognormal(double meanlog, double sdlog) noexcept {
        return std::exp(meanlog + sdlog * standard_normal());
    }

    // Marsaglia-Tsang; shapes < 1 are boosted via the U^(1/shape) identity.
    double gamma(double shape, double rate) noexcept {
        if (shape < 1.0) {
            const double u = uniform_open();
            return gamma(shape + 1.0, rate) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x;
            double v;
            do {
                x = standard_normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform_open();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
        }
    }

  private:
    std::uint64_t state_[4];
};

}  // namespace seqgini
