#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "goba/errors.hpp"
#include "goba/geometry.hpp"

namespace goba {

// Identifier recorded in reports so consumers can tell which generator
// produced a sampled artifact. Bump the suffix if the draw algorithms change.
inline constexpr std::string_view kGeneratorId = "mt19937_64/rej-v1";

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Stable per-purpose seed so independent sampling stages (per-task draws,
// the final shuffle) do not consume from one shared stream.
inline std::uint64_t derive_substream(std::uint64_t seed, std::string_view tag) {
    return splitmix64(seed ^ fnv1a64(tag));
}

// Seeded generator with draw algorithms spelled out here rather than taken
// from <random> distributions, which the standard leaves implementation
// defined. Identical (seed, call sequence) gives identical values on every
// platform, which the byte-identical-output contract depends on.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Unbiased integer in [0, bound) by rejection.
    std::uint64_t below(std::uint64_t bound) {
        if (bound == 0) throw DomainError("Rng::below: bound must be positive");
        const std::uint64_t zone = (UINT64_MAX / bound) * bound;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r < zone) return r % bound;
        }
    }

    // Uniform double in [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

    // Uniform direction on the unit sphere.
    Vec3 sphere_direction() {
        const double z = 2.0 * unit() - 1.0;
        const double phi = 2.0 * 3.14159265358979323846 * unit();
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        return {r * std::cos(phi), r * std::sin(phi), z};
    }

    // Fisher-Yates permutation of [0, n).
    std::vector<std::size_t> permutation(std::size_t n) {
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        shuffle(idx);
        return idx;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // First m entries of a random permutation of [0, n): a sample without
    // replacement in draw order.
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t m) {
        if (m > n) throw DomainError("sample_without_replacement: m > n");
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        for (std::size_t j = 0; j < m; ++j) {
            const std::size_t pick = j + static_cast<std::size_t>(below(n - j));
            std::swap(idx[j], idx[pick]);
        }
        idx.resize(m);
        return idx;
    }

private:
    std::mt19937_64 gen_;
};

} // namespace goba
