#pragma once

#include <cstdint>
#include <cmath>
#include <string>
#include <vector>

namespace cvrisk {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Combine a seed with a stream id so sub-generators are independent.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(seed ^ splitmix64(stream + 0x9E3779B97F4A7C15ULL));
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return derive_seed(derive_seed(seed, a), b);
}

// Deterministic generator with explicitly pinned sampling algorithms.
// std::shuffle / std::*_distribution are implementation defined, so every
// draw used for reproducible artifacts goes through this class instead.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t x = state_;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in the open interval (0, 1).
    double uniform_open01() {
        double u;
        do {
            u = uniform01();
        } while (u == 0.0);
        return u;
    }

    // Unbiased integer in [0, n). Lemire's method with rejection.
    std::uint64_t uniform_index(std::uint64_t n) {
        if (n == 0) return 0;
        __uint128_t m = static_cast<__uint128_t>(next_u64()) * n;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < n) {
            std::uint64_t t = (0 - n) % n;
            while (lo < t) {
                m = static_cast<__uint128_t>(next_u64()) * n;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Box-Muller, one value per call.
    double normal(double mean = 0.0, double stddev = 1.0) {
        double u1 = uniform_open01();
        double u2 = uniform01();
        double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
        return mean + stddev * z;
    }

    double exponential(double mean) { return -mean * std::log(uniform_open01()); }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = uniform_index(i);
            std::swap(v[i - 1], v[j]);
        }
    }

    std::vector<std::size_t> permutation(std::size_t n) {
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        shuffle(idx);
        return idx;
    }

private:
    std::uint64_t state_;
};

// Stable 64-bit content hash (FNV-1a). Used for manifests, not security.
inline std::uint64_t fnv1a64(const void* data, std::size_t len, std::uint64_t h = 0xCBF29CE484222325ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001B3ULL;
    }
    return h;
}

inline std::uint64_t fnv1a64(const std::string& s, std::uint64_t h = 0xCBF29CE484222325ULL) {
    return fnv1a64(s.data(), s.size(), h);
}

}  // namespace cvrisk
