#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace featnoise {

// Input or configuration rejected before any work was done.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// File could not be read or written.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Degenerate linear system (collinear design, non positive definite moments).
class SingularError : public std::runtime_error {
public:
    explicit SingularError(const std::string& msg) : std::runtime_error(msg) {}
};

// Fixed 64-bit mixer used everywhere a derived seed is needed. Feeding the
// same (seed, salt) pair always yields the same stream seed, so work items
// can be scheduled in any order.
inline std::uint64_t mix64(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t x = seed ^ (salt + 0x9e3779b97f4a7c15ull + (seed << 6) + (seed >> 2));
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// FNV-1a, for deriving per-document seeds from string ids.
inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

// Counter-style generator (splitmix64): state advances by a fixed increment
// and the output is a bijective hash of the counter. Gaussians come from the
// Box-Muller cosine branch, so every draw is a pure function of the seed and
// the call index.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t x = (state_ += 0x9e3779b97f4a7c15ull);
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        return x ^ (x >> 31);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller; consumes two uniforms per call.
    double gaussian() {
        double u1 = 1.0 - uniform01();  // (0, 1], keeps the log finite
        double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    double gaussian(double mean, double variance) {
        return mean + std::sqrt(variance) * gaussian();
    }

    // Uniform integer in [0, n) via the multiply-then-shift reduction.
    std::uint64_t bounded(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

private:
    std::uint64_t state_;
};

// Decimal (never scientific) rendering with a fixed number of significant
// digits; used by the CSV writers.
std::string format_decimal(double v, int significant_digits = 12);

}  // namespace featnoise
