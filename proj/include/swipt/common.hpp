#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace swipt {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// =======================================================================
// Errors
// =======================================================================

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define SWIPT_DEFINE_ERROR(Name)                         \
    class Name : public Error {                          \
    public:                                              \
        using Error::Error;                              \
    };

SWIPT_DEFINE_ERROR(InvalidOrderError)
SWIPT_DEFINE_ERROR(InvalidSymbolError)
SWIPT_DEFINE_ERROR(InvalidSampleError)
SWIPT_DEFINE_ERROR(InvalidConfigError)
SWIPT_DEFINE_ERROR(InvalidFrameError)
SWIPT_DEFINE_ERROR(SearchTooLargeError)
SWIPT_DEFINE_ERROR(NonConvergenceError)
SWIPT_DEFINE_ERROR(InfeasibleAllocationError)

#undef SWIPT_DEFINE_ERROR

// =======================================================================
// Angles and units
// =======================================================================

/// Wraps an angle into the half-open interval [-pi, pi).
inline double wrap_angle(double theta)
{
    double w = std::fmod(theta + pi, two_pi);
    if (w < 0.0) w += two_pi;
    w -= pi;
    // fmod can land exactly on +pi after the shift for inputs like -pi - 2pi*eps
    if (w >= pi) w -= two_pi;
    return w;
}

/// Smallest absolute difference between two angles, in [0, pi].
inline double angle_distance(double a, double b)
{
    return std::abs(wrap_angle(a - b));
}

/// P[dBm] = 10 log10(P[mW]).  -inf dBm maps to 0 W.
inline double dbm_to_watt(double dbm) { return std::pow(10.0, dbm / 10.0) * 1e-3; }
inline double watt_to_dbm(double watt) { return 10.0 * std::log10(watt * 1e3); }

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

// =======================================================================
// Random streams
// =======================================================================

using Rng = std::mt19937_64;

/// Independent generator for a (seed, a, b, c) coordinate.  Used to give each
/// frame / carrier / restart its own stream so results do not depend on the
/// order or thread in which work items run.
inline Rng make_stream(std::uint64_t seed, std::uint64_t a = 0, std::uint64_t b = 0,
                       std::uint64_t c = 0)
{
    auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); };
    auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
    std::seed_seq seq{lo(seed), hi(seed), lo(a), hi(a), lo(b), hi(b), lo(c), hi(c)};
    return Rng(seq);
}

/// Uniform double in [lo, hi) built from the top 53 bits of one draw.
inline double uniform(Rng& rng, double lo, double hi)
{
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
}

inline double uniform_angle(Rng& rng) { return uniform(rng, -pi, pi); }

} // namespace swipt
