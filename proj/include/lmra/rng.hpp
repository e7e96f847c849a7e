#pragma once

#include <cmath>
#include <cstdint>

namespace lmra {

/// Identifies a reproducible random stream. Equal (seed, stream) pairs give
/// identical draws on every platform; distinct stream ids give statistically
/// independent sequences, so e.g. each tensor mode can own a stream and the
/// result is independent of evaluation order.
struct RngStream {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

/// PCG32 generator with a Box-Muller normal layer. Implemented here rather
/// than with <random> because std::normal_distribution output is
/// implementation-defined, which would break cross-toolchain reproducibility.
class RandomStream {
public:
    explicit RandomStream(RngStream s) {
        inc_ = (s.stream << 1u) | 1u;
        state_ = 0;
        next_u32();
        state_ += s.seed;
        next_u32();
    }

    std::uint32_t next_u32() {
        std::uint64_t old = state_;
        state_ = old * 6364136223846793005ULL + inc_;
        std::uint32_t xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
        std::uint32_t rot = static_cast<std::uint32_t>(old >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_double() {
        std::uint64_t hi = next_u32();
        std::uint64_t lo = next_u32();
        std::uint64_t x = (hi << 32) | lo;
        return static_cast<double>(x >> 11) * 0x1.0p-53;
    }

    /// Standard normal draw (Box-Muller, pairs cached).
    double next_normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        double u1 = 1.0 - next_double();  // (0, 1]
        double u2 = next_double();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(a);
        has_cached_ = true;
        return r * std::cos(a);
    }

private:
    std::uint64_t state_ = 0;
    std::uint64_t inc_ = 1;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace lmra
