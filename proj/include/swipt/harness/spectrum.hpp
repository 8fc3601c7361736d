#pragma once

#include <swipt/power.hpp>

#include <cmath>
#include <span>
#include <vector>

namespace swipt {

/*
 * kappa = sum_k R_k / (N B), R_k = sum_n B log2(1 + SINR_{n,k}), where
 * user k sees users i < k (already weaker, not yet cancelled) as interference.
 * Gains are frequency-flat: gains[k] applies on every carrier.
 */
inline double spectrum_efficiency(std::span<const PowerAllocation> per_carrier, std::span<const double> gains,
                                  double sigma2, double bandwidth, SinrConvention conv)
{
    if (per_carrier.empty()) throw InvalidConfigError("need at least one carrier");
    if (!(bandwidth > 0.0)) throw InvalidConfigError("bandwidth must be > 0");
    double rate = 0.0;
    for (const auto& alloc : per_carrier) {
        if (alloc.users() != gains.size()) throw InvalidConfigError("gain count does not match user count");
        for (double s : sinr_per_user(alloc.per_user, gains, sigma2, conv)) rate += bandwidth * std::log2(1.0 + s);
    }
    return rate / (static_cast<double>(per_carrier.size()) * bandwidth);
}

/// OFDMA reference: carrier n belongs to user n mod K_I, which gets the
/// carrier's full power and no interference.
inline double ofdma_spectrum_efficiency(std::span<const double> carrier_power, std::span<const double> gains,
                                        double sigma2, double bandwidth)
{
    if (carrier_power.empty() || gains.empty()) throw InvalidConfigError("need carriers and users");
    if (!(bandwidth > 0.0)) throw InvalidConfigError("bandwidth must be > 0");
    double rate = 0.0;
    for (std::size_t n = 0; n < carrier_power.size(); ++n) {
        const double h = gains[n % gains.size()];
        rate += bandwidth * std::log2(1.0 + h * carrier_power[n] / sigma2);
    }
    return rate / (static_cast<double>(carrier_power.size()) * bandwidth);
}

} // namespace swipt
