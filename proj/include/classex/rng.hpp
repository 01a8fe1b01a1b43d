#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "classex/normal.hpp"

namespace classex {

// splitmix64 finalizer; used to derive independent stream seeds from
// (seed, tag, index...) tuples so that every logical unit of work owns
// its own generator and results do not depend on scheduling.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
    return mix64(mix64(a) ^ (b + 0x9e3779b97f4a7c15ull));
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return mix64(mix64(a, b), c);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b, std::uint64_t c,
                           std::uint64_t d) {
    return mix64(mix64(a, b, c), d);
}

// Stream tags keep unrelated consumers of the same user seed decorrelated.
namespace rng_tag {
inline constexpr std::uint64_t tie_break = 0x7469655f62726bull;   // "tie_brk"
inline constexpr std::uint64_t fresh_task = 0x66726573685f74ull;  // "fresh_t"
inline constexpr std::uint64_t resample = 0x726573616d706cull;    // "resampl"
inline constexpr std::uint64_t sim_task = 0x73696d5f74736bull;    // "sim_tsk"
inline constexpr std::uint64_t toy = 0x746f795f6d6f64ull;         // "toy_mod"
inline constexpr std::uint64_t study = 0x73747564795f72ull;       // "study_r"
inline constexpr std::uint64_t bootstrap = 0x626f6f74737472ull;   // "bootstr"
} // namespace rng_tag

// Deterministic random stream. Uniforms come from the top 53 bits of a
// mt19937_64 draw; normals go through the inverse CDF so no generator
// state is cached between calls.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // uniform on (0,1): rejects the exact-zero draw so probit stays finite
    double uniform_open() {
        double u;
        do {
            u = uniform();
        } while (u <= 0.0);
        return u;
    }

    double normal() { return norm_quantile(uniform_open()); }

    // unbiased integer in [0, n)
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    // k distinct indices from [0, n), partial Fisher-Yates, sorted output
    std::vector<std::int64_t> sample_without_replacement(std::int64_t n, std::int64_t k);

    // k indices from [0, n) independently
    std::vector<std::int64_t> sample_with_replacement(std::int64_t n, std::int64_t k);

private:
    std::mt19937_64 engine_;
};

inline std::vector<std::int64_t> RandomStream::sample_without_replacement(std::int64_t n,
                                                                          std::int64_t k) {
    std::vector<std::int64_t> pool(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
    for (std::int64_t i = 0; i < k; ++i) {
        const auto j = i + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(n - i)));
        std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    }
    pool.resize(static_cast<std::size_t>(k));
    std::sort(pool.begin(), pool.end());
    return pool;
}

inline std::vector<std::int64_t> RandomStream::sample_with_replacement(std::int64_t n,
                                                                       std::int64_t k) {
    std::vector<std::int64_t> out(static_cast<std::size_t>(k));
    for (auto& v : out) v = static_cast<std::int64_t>(below(static_cast<std::uint64_t>(n)));
    return out;
}

} // namespace classex
