#pragma once

#include <swipt/common.hpp>
#include <swipt/rotation.hpp>

#include <span>
#include <vector>

namespace swipt {

/// Carrier-major grid of superposition symbols: grid[n][l].
using SuperGrid = std::vector<std::vector<SuperSymbol>>;

/// Energy of one superposition symbol over a symbol period, as the double sum
/// T/2 sum_{k1,k2} d1 d2 A1 A2 cos(phi1 - phi2).
inline double symbol_energy(const SuperSymbol& s, double symbol_period)
{
    double e = 0.0;
    for (const auto& a : s.terms)
        for (const auto& b : s.terms) e += a.scale * b.scale * a.amp * b.amp * std::cos(a.phase - b.phase);
    return 0.5 * symbol_period * e;
}

inline double frame_energy(const SuperGrid& grid, double symbol_period)
{
    double e = 0.0;
    for (const auto& carrier : grid)
        for (const auto& s : carrier) e += symbol_energy(s, symbol_period);
    return e;
}

/// Where the activation threshold is applied.
enum class HarvestGating {
    per_slot,       ///< each (carrier, symbol slot) on its own
    per_symbol_sum  ///< summed over carriers for each symbol slot
};

struct HarvesterModel {
    double sensitivity_w = 0.0;  ///< P_th
    double gain = 1.0;           ///< linear WPT channel power gain
    double symbol_period = 1e-6; ///< T (s)
    HarvestGating gating = HarvestGating::per_slot;

    void validate() const
    {
        if (!(sensitivity_w >= 0.0)) throw InvalidConfigError("P_th must be >= 0 W");
        if (!(gain > 0.0 && gain <= 1.0)) throw InvalidConfigError("WPT gain must be in (0, 1]");
        if (!(symbol_period > 0.0)) throw InvalidConfigError("T must be > 0");
    }

    double sensitivity_dbm() const { return watt_to_dbm(sensitivity_w); }
};

struct EnergyReport {
    double radiated = 0.0;  ///< J, before the channel
    double received = 0.0;  ///< J
    double harvested = 0.0; ///< J
    double activation_fraction = 0.0;
    std::uint64_t slots = 0;
    std::uint64_t active_slots = 0;

    EnergyReport& operator+=(const EnergyReport& o)
    {
        radiated += o.radiated;
        received += o.received;
        harvested += o.harvested;
        slots += o.slots;
        active_slots += o.active_slots;
        activation_fraction = slots ? static_cast<double>(active_slots) / static_cast<double>(slots) : 0.0;
        return *this;
    }
};

/*
 * Threshold-gated harvester: E = P T 1(P >= P_th), with received power
 * P = gain |s|^2 / 2 (the mean power of Re[s e^{j 2 pi f t}]).  No RF-to-DC
 * conversion loss is modelled.
 */
inline EnergyReport harvested_energy(const SuperGrid& grid, const HarvesterModel& model)
{
    model.validate();
    EnergyReport r;
    const double t = model.symbol_period;
    if (model.gating == HarvestGating::per_slot) {
        for (const auto& carrier : grid)
            for (const auto& s : carrier) {
                const double p_tx = 0.5 * std::norm(s.value);
                const double p_rx = model.gain * p_tx;
                r.radiated += p_tx * t;
                r.received += p_rx * t;
                ++r.slots;
                if (p_rx >= model.sensitivity_w) {
                    r.harvested += p_rx * t;
                    ++r.active_slots;
                }
            }
    } else {
        const std::size_t len = grid.empty() ? 0 : grid.front().size();
        for (std::size_t l = 0; l < len; ++l) {
            double p_tx = 0.0;
            for (const auto& carrier : grid) p_tx += 0.5 * std::norm(carrier.at(l).value);
            const double p_rx = model.gain * p_tx;
            r.radiated += p_tx * t;
            r.received += p_rx * t;
            ++r.slots;
            if (p_rx >= model.sensitivity_w) {
                r.harvested += p_rx * t;
                ++r.active_slots;
            }
        }
    }
    r.activation_fraction = r.slots ? static_cast<double>(r.active_slots) / static_cast<double>(r.slots) : 0.0;
    return r;
}

} // namespace swipt
