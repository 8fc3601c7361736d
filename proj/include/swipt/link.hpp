#pragma once

#include <swipt/common.hpp>
#include <swipt/modem.hpp>
#include <swipt/power.hpp>
#include <swipt/rotation.hpp>

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace swipt {

// =======================================================================
// AWGN channel
// =======================================================================

struct AwgnChannel {
    double gain_db = 0.0;     ///< channel power gain
    double noise_power = 0.0; ///< sigma^2 (W), total over both quadratures
    Rng rng{};

    double amplitude_gain() const { return std::sqrt(db_to_linear(gain_db)); }
};

/// y = sqrt(h) x + n, n circular Gaussian with E|n|^2 = sigma^2.
inline std::vector<cplx> apply_awgn(std::span<const cplx> symbols, AwgnChannel& ch)
{
    const double a = ch.amplitude_gain();
    std::vector<cplx> out(symbols.size());
    if (ch.noise_power <= 0.0) {
        for (std::size_t i = 0; i < symbols.size(); ++i) out[i] = a * symbols[i];
        return out;
    }
    std::normal_distribution<double> noise(0.0, std::sqrt(0.5 * ch.noise_power));
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        const double re = noise(ch.rng);
        const double im = noise(ch.rng);
        out[i] = a * symbols[i] + cplx{re, im};
    }
    return out;
}

// =======================================================================
// Distortion seen by user k
// =======================================================================

/// xi = sum_{i<k} d_i A_i e^{j(phi_i - theta_k)} for the rotated terms of the
/// weaker users, split into in-phase and quadrature parts.
inline std::pair<double, double> distortion(std::span<const SuperTerm> lower_terms, double theta_k)
{
    double re = 0.0;
    double im = 0.0;
    for (const auto& t : lower_terms) {
        re += t.scale * t.amp * std::cos(t.phase - theta_k);
        im += t.scale * t.amp * std::sin(t.phase - theta_k);
    }
    return {re, im};
}

// =======================================================================
// Rotation-aware SIC receiver
// =======================================================================

struct SicConfig {
    int order = 4;
    PowerAllocation alloc;
    const RotationMatrix* thetas = nullptr;
    double channel_amplitude = 1.0; ///< sqrt(h) removed before detection

    int users() const { return static_cast<int>(alloc.users()); }

    /// Users in detection order: highest power first.
    std::vector<int> detection_order() const
    {
        std::vector<int> order_(users());
        for (int i = 0; i < users(); ++i) order_[i] = users() - 1 - i;
        return order_;
    }

    void validate() const
    {
        if (!thetas) throw InvalidConfigError("SIC config has no rotation matrix");
        if (thetas->users != users()) throw InvalidConfigError("rotation matrix user count mismatch");
        for (int k = 1; k < users(); ++k)
            if (alloc.per_user[k] < alloc.per_user[k - 1])
                throw InvalidConfigError("SIC needs powers non-decreasing in user index");
        if (!(channel_amplitude > 0.0)) throw InvalidConfigError("channel amplitude must be > 0");
    }
};

/*
 * For each carrier: starting with the strongest user, de-rotate the residual
 * by -theta_i, detect on user i's grid (spacing 2 d_i) treating everything
 * else as interference, and unless i is the target, subtract the re-rotated
 * clean point d_i s_i e^{j theta_i}.  Returns the target user's detected
 * blocks in carrier order (original_index holds the carrier).
 */
inline std::vector<SymbolBlock> sic_receive(const std::vector<std::vector<cplx>>& received,
                                            const SicConfig& cfg, int target_user)
{
    cfg.validate();
    if (target_user < 0 || target_user >= cfg.users()) throw InvalidConfigError("target user out of range");
    const QamConstellation qam(cfg.order);
    if (static_cast<int>(received.size()) != cfg.thetas->carriers)
        throw InvalidFrameError("received grid carrier count mismatch");

    std::vector<SymbolBlock> out(received.size());
    for (std::size_t n = 0; n < received.size(); ++n) {
        auto& block = out[n];
        block.user = target_user;
        block.original_index = static_cast<int>(n);
        block.symbols.reserve(received[n].size());
        block.indices.reserve(received[n].size());
        std::vector<cplx> rot(cfg.users());
        for (int i = 0; i < cfg.users(); ++i) rot[i] = std::polar(1.0, cfg.thetas->at(static_cast<int>(n), i));
        for (const cplx y : received[n]) {
            cplx residual = y / cfg.channel_amplitude;
            for (int i = cfg.users() - 1; i >= target_user; --i) {
                const double d = cfg.alloc.half_dist[i];
                const int idx = qam.detect(residual * std::conj(rot[i]) / d);
                if (i == target_user) {
                    block.symbols.push_back(to_mod_symbol(qam.point(idx)));
                    block.indices.push_back(static_cast<std::uint16_t>(idx));
                } else {
                    residual -= d * qam.point(idx) * rot[i];
                }
            }
        }
    }
    return out;
}

// =======================================================================
// SER
// =======================================================================

struct SerCount {
    std::vector<std::uint64_t> errors;
    std::vector<std::uint64_t> symbols;

    std::vector<double> ser() const
    {
        std::vector<double> out(errors.size());
        for (std::size_t k = 0; k < errors.size(); ++k)
            out[k] = symbols[k] ? static_cast<double>(errors[k]) / static_cast<double>(symbols[k]) : 0.0;
        return out;
    }
};

/// Mismatch counts per user; grids are [user][symbol].
inline SerCount count_symbol_errors(const std::vector<std::vector<std::uint16_t>>& sent,
                                    const std::vector<std::vector<std::uint16_t>>& detected)
{
    if (sent.size() != detected.size()) throw InvalidFrameError("SER grids differ in user count");
    SerCount c;
    c.errors.resize(sent.size(), 0);
    c.symbols.resize(sent.size(), 0);
    for (std::size_t k = 0; k < sent.size(); ++k) {
        if (sent[k].size() != detected[k].size()) throw InvalidFrameError("SER grids differ in length");
        for (std::size_t i = 0; i < sent[k].size(); ++i) c.errors[k] += sent[k][i] != detected[k][i];
        c.symbols[k] = sent[k].size();
    }
    return c;
}

inline std::vector<double> measure_ser(const std::vector<std::vector<std::uint16_t>>& sent,
                                       const std::vector<std::vector<std::uint16_t>>& detected)
{
    return count_symbol_errors(sent, detected).ser();
}

} // namespace swipt
