#pragma once

#include <swipt/common.hpp>

#include <bit>
#include <cmath>
#include <cstdint>

namespace swipt {

/// ceil(log2(x)) for x >= 1.
inline int ceil_log2(std::uint64_t x)
{
    return x <= 1 ? 0 : static_cast<int>(std::bit_width(x - 1));
}

/// ceil(log2(N!)); exact integer arithmetic while N! fits in 64 bits.
inline int ceil_log2_factorial(int n)
{
    if (n <= 20) {
        std::uint64_t f = 1;
        for (int i = 2; i <= n; ++i) f *= static_cast<std::uint64_t>(i);
        return ceil_log2(f);
    }
    // N! is not a power of two for N >= 3, so the ceiling of the real log is safe.
    long double bits = 0.0L;
    for (int i = 2; i <= n; ++i) bits += std::log2(static_cast<long double>(i));
    return static_cast<int>(std::ceil(bits));
}

struct ControlOverhead {
    std::int64_t interleaver_bits = 0;
    std::int64_t rotation_bits = 0;

    std::int64_t total() const { return interleaver_bits + rotation_bits; }
};

/*
 * Signalling per frame: each user's permutation is one of N! choices, and
 * K_I - 1 relative angles per carrier are sent as D-level region indices
 * (one user's constellation is the phase reference).
 */
inline ControlOverhead control_overhead(int users, int carriers, int levels)
{
    if (users < 1 || carriers < 1 || levels < 1) throw InvalidConfigError("K_I, N, D must be >= 1");
    ControlOverhead o;
    o.interleaver_bits = static_cast<std::int64_t>(users) * ceil_log2_factorial(carriers);
    o.rotation_bits = static_cast<std::int64_t>(carriers) * (users - 1) *
                      ceil_log2(static_cast<std::uint64_t>(levels));
    return o;
}

struct QuantizedAngle {
    int region = 1;            ///< 1-based
    double representative = 0; ///< region midpoint
};

/// Region k covers [-pi + 2(k-1)pi/D, -pi + 2k pi/D); the angle is wrapped first.
inline QuantizedAngle quantize_angle(double theta, int levels)
{
    if (levels < 1) throw InvalidConfigError("D must be >= 1");
    const double width = two_pi / levels;
    const double t = wrap_angle(theta);
    int k = static_cast<int>(std::floor((t + pi) / width)) + 1;
    if (k < 1) k = 1;
    if (k > levels) k = levels;
    return {k, -pi + (2.0 * k - 1.0) * pi / levels};
}

} // namespace swipt
