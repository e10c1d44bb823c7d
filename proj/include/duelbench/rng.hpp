#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

#include "duelbench/errors.hpp"

namespace duelbench {

/// SplitMix64 finalizer. Used for seed derivation and key whitening.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// FNV-1a over bytes; stable across platforms. Used to derive sub-seeds from names.
inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t hash_seed(std::uint64_t seed, std::uint64_t salt) {
    return mix64(mix64(seed) + salt);
}

inline std::uint64_t hash_seed(std::uint64_t seed, std::string_view salt) {
    return hash_seed(seed, fnv1a64(salt));
}

/// Inverse of the standard normal CDF (Wichura's AS 241, double precision).
/// Requires p in (0, 1).
double normal_quantile(double p);

/// Counter-based generator: Philox4x32 with 10 rounds (Salmon et al. constants).
///
/// The full generation algorithm is pinned so that any implementation, in any
/// language, reproduces identical streams:
///   key     = mix64(mix64(seed) + stream), split into two 32-bit words
///             (low word first).
///   counter = 128-bit block counter starting at 0, incremented once per
///             4-word block, little-endian word order.
///   u64     = block word0 | (word1 << 32), then word2 | (word3 << 32).
///   uniform = ((u64 >> 11) + 0.5) * 2^-53, giving a double in (0, 1).
///   normal  = AS 241 inverse-CDF applied to uniform.
///   ints    = modulo rejection sampling on u64 (see uniform_int).
/// Draw order is part of every caller's contract; callers that need
/// order-independence use distinct (seed, stream) pairs instead.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) {
        const std::uint64_t key = mix64(mix64(seed) + stream);
        key0_ = static_cast<std::uint32_t>(key);
        key1_ = static_cast<std::uint32_t>(key >> 32);
    }

    std::uint64_t next_u64() {
        if (buffered_ == 0) refill();
        --buffered_;
        const std::uint32_t lo = buffer_[buffer_pos_++];
        const std::uint32_t hi = buffer_[buffer_pos_++];
        return static_cast<std::uint64_t>(lo) | (static_cast<std::uint64_t>(hi) << 32);
    }

    /// Uniform double in the open interval (0, 1), 53 usable bits.
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Log-uniform on [lo, hi]; requires 0 < lo < hi.
    double log_uniform(double lo, double hi) {
        return std::exp(uniform(std::log(lo), std::log(hi)));
    }

    /// Uniform integer in [lo, hi], both inclusive. Modulo rejection keeps the
    /// draw unbiased and the algorithm pinned.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        if (lo > hi) throw ConfigError("uniform_int: empty range");
        const std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
        if (span == 0) return static_cast<std::int64_t>(next_u64());  // full 64-bit range
        const std::uint64_t reject_below = (0 - span) % span;         // 2^64 mod span
        std::uint64_t x = next_u64();
        while (x < reject_below) x = next_u64();
        return lo + static_cast<std::int64_t>(x % span);
    }

    /// Standard normal deviate via the inverse CDF.
    double normal() { return normal_quantile(uniform01()); }

    bool bernoulli(double p) { return uniform01() < p; }

    /// Fisher-Yates from the back; one uniform_int per position.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(i) - 1));
            std::swap(v[i - 1], v[j]);
        }
    }

    /// One Philox4x32-10 block for the given counter words, independent of the
    /// internal stream position. Exposed for known-answer tests.
    static void philox_block(std::uint32_t key0, std::uint32_t key1, const std::uint32_t ctr_in[4],
                             std::uint32_t out[4]);

private:
    void refill();

    std::uint32_t key0_ = 0, key1_ = 0;
    std::uint64_t ctr_lo_ = 0, ctr_hi_ = 0;
    std::uint32_t buffer_[4] = {0, 0, 0, 0};
    int buffer_pos_ = 0;
    int buffered_ = 0;  // u64s remaining in buffer
};

}  // namespace duelbench
