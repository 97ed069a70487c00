#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>

namespace hedgelab {

// Counter-based random numbers (Philox4x32-10). Every draw is a pure function
// of (master_seed, path_index, channel, counter), so simulations are
// reproducible bit-for-bit regardless of thread count or evaluation order,
// and independent consumers (diffusion draws, jump counts, jump marks, ...)
// never shift each other's streams.

struct SeedSpec {
    std::uint64_t master_seed = 0;
};

// Channel labels. Simulators that share draws (e.g. a jump bond re-using the
// stock's marks) must use the same channel.
namespace channel {
inline constexpr std::uint32_t diffusion0 = 0;  // primary Brownian driver
inline constexpr std::uint32_t diffusion1 = 1;  // volatility driver
inline constexpr std::uint32_t diffusion2 = 2;  // vol-of-vol driver
inline constexpr std::uint32_t jump_count = 3;
inline constexpr std::uint32_t jump_mark = 4;
inline constexpr std::uint32_t jump_size_s = 5;
inline constexpr std::uint32_t jump_size_v = 6;
inline constexpr std::uint32_t hawkes_s = 7;
inline constexpr std::uint32_t hawkes_v = 8;
inline constexpr std::uint32_t fbm = 9;
}  // namespace channel

namespace detail {

struct Philox4x32State {
    std::uint32_t c[4];
    std::uint32_t k[2];
};

inline void philox_round(Philox4x32State& s) {
    constexpr std::uint64_t M0 = 0xD2511F53ull;
    constexpr std::uint64_t M1 = 0xCD9E8D57ull;
    const std::uint64_t p0 = M0 * s.c[0];
    const std::uint64_t p1 = M1 * s.c[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    const std::uint32_t c1 = s.c[1], c3 = s.c[3];
    s.c[0] = hi1 ^ c1 ^ s.k[0];
    s.c[1] = lo1;
    s.c[2] = hi0 ^ c3 ^ s.k[1];
    s.c[3] = lo0;
    s.k[0] += 0x9E3779B9u;
    s.k[1] += 0xBB67AE85u;
}

// One Philox4x32-10 block: 128 bits of output for a given counter.
inline Philox4x32State philox_block(std::uint64_t seed, std::uint64_t path,
                                    std::uint32_t chan, std::uint64_t counter) {
    Philox4x32State s;
    s.c[0] = static_cast<std::uint32_t>(counter);
    s.c[1] = static_cast<std::uint32_t>(counter >> 32);
    s.c[2] = static_cast<std::uint32_t>(path) ^ chan;
    s.c[3] = static_cast<std::uint32_t>(path >> 32) ^ (chan * 0x85EBCA6Bu + 1u);
    s.k[0] = static_cast<std::uint32_t>(seed);
    s.k[1] = static_cast<std::uint32_t>(seed >> 32);
    for (int r = 0; r < 10; ++r) philox_round(s);
    return s;
}

inline double u64_to_unit(std::uint64_t x) {
    // (0,1): top 53 bits, offset half an ulp away from zero
    return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace detail

// A per-(path, channel) stream over the counter space. Copyable, no heap.
class CounterStream {
  public:
    CounterStream(SeedSpec seed, std::uint64_t path, std::uint32_t chan,
                  std::uint64_t start = 0)
        : seed_(seed.master_seed), path_(path), chan_(chan), counter_(start) {}

    std::uint64_t index() const { return counter_; }

    double next_uniform() {
        const auto b = detail::philox_block(seed_, path_, chan_, counter_++);
        return detail::u64_to_unit((static_cast<std::uint64_t>(b.c[0]) << 32) | b.c[1]);
    }

    double next_normal() {
        const auto b = detail::philox_block(seed_, path_, chan_, counter_++);
        const double u1 =
            detail::u64_to_unit((static_cast<std::uint64_t>(b.c[0]) << 32) | b.c[1]);
        const double u2 =
            detail::u64_to_unit((static_cast<std::uint64_t>(b.c[2]) << 32) | b.c[3]);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    // Poisson by CDF inversion from one uniform; adequate for the mean counts
    // used here (lambda*dt well below the hundreds).
    int next_poisson(double mean) {
        if (mean < 0.0) throw std::invalid_argument("next_poisson: negative mean");
        if (mean == 0.0) return 0;
        const double u = next_uniform();
        double p = std::exp(-mean), cdf = p;
        int k = 0;
        while (u > cdf && k < 100000) {
            ++k;
            p *= mean / k;
            cdf += p;
        }
        return k;
    }

  private:
    std::uint64_t seed_;
    std::uint64_t path_;
    std::uint32_t chan_;
    std::uint64_t counter_;
};

// Stateless single draws, for consumers indexed by step.
inline double normal_at(SeedSpec seed, std::uint64_t path, std::uint32_t chan,
                        std::uint64_t index) {
    return CounterStream(seed, path, chan, index).next_normal();
}

}  // namespace hedgelab
