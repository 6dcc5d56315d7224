#pragma once

// Counter-based splittable random streams.
//
// Each stream is a SplitMix64-style generator: a 64-bit counter advanced by a
// per-stream odd increment (gamma), with the output being a bijective mix of
// the counter.  A stream is fully determined by (seed, stream-id), so Monte
// Carlo replicas get statistically independent streams from
// RngStream(master_seed, replica_index) with no coordination between threads.
//
// Steele, Lea & Flood, "Fast splittable pseudorandom number generators",
// OOPSLA 2014; mixers are Stafford's variant 13 and the Murmur3 finalizer.

#include <bit>
#include <cstdint>

#include "nrbm/math.hpp"

namespace nrbm {

namespace detail {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ull;

constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

constexpr std::uint64_t mix_gamma(std::uint64_t z) {
    z = (z ^ (z >> 33)) * 0xFF51AFD7ED558CCDull;
    z = (z ^ (z >> 33)) * 0xC4CEB9FE1A85EC53ull;
    z = (z ^ (z >> 33)) | 1ull;
    // require enough bit transitions in the increment, as in SplittableRandom
    if (std::popcount(z ^ (z >> 1)) < 24) z ^= 0xAAAAAAAAAAAAAAAAull;
    return z;
}

} // namespace detail

class RngStream {
public:
    explicit RngStream(std::uint64_t seed = 0, std::uint64_t stream = 0) noexcept {
        const std::uint64_t base = detail::mix64(seed + detail::kGoldenGamma);
        state_ = detail::mix64(base ^ detail::mix64(stream + detail::kGoldenGamma));
        gamma_ = detail::mix_gamma(base + stream * detail::kGoldenGamma);
    }

    std::uint64_t next_u64() noexcept {
        state_ += gamma_;
        return detail::mix64(state_);
    }

    /// Uniform on the open interval (0,1): midpoints of 2^53 equal cells,
    /// so neither endpoint can occur and log/inverse-CDF transforms are safe.
    double next_double() noexcept {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal via the inverse-CDF method (AS 241); exactly one
    /// uniform is consumed per draw.
    double next_gaussian() {
        return inv_normal_cdf(next_double());
    }

    /// Exponential with unit rate.
    double next_exponential() {
        return -std::log(next_double());
    }

    /// Unbiased uniform integer in [0, bound), bound >= 1 (Lemire's method).
    std::uint64_t next_below(std::uint64_t bound) noexcept {
        using u128 = unsigned __int128;
        std::uint64_t x = next_u64();
        u128 m = static_cast<u128>(x) * bound;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < bound) {
            const std::uint64_t threshold = -bound % bound;
            while (lo < threshold) {
                x = next_u64();
                m = static_cast<u128>(x) * bound;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// Child stream keyed off the current position; does not advance the
    /// parent, and equal keys from equal positions give equal children.
    RngStream derive(std::uint64_t key) const noexcept {
        RngStream child(0, 0);
        child.state_ = detail::mix64(state_ + detail::mix64(key + detail::kGoldenGamma));
        child.gamma_ = detail::mix_gamma(gamma_ ^ detail::mix64(key));
        return child;
    }

    friend bool operator==(const RngStream&, const RngStream&) = default;

private:
    std::uint64_t state_;
    std::uint64_t gamma_;
};

} // namespace nrbm
