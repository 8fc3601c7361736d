#pragma once

#include <swipt/common.hpp>
#include <swipt/modem.hpp>

#include <algorithm>
#include <numeric>
#include <span>
#include <vector>

namespace swipt {

/// Which channel gain scales an already-decoded interferer in a user's SINR.
/// `interferer`: h_{n,i} P_{n,i} (each interferer scaled by its own gain).
/// `receiver`:   h_{n,k} P_{n,i} (the interferers reach user k through k's channel).
enum class SinrConvention { interferer, receiver };

// =======================================================================
// PowerAllocation
// =======================================================================

/*
 * Per-carrier split of P_n across the WIT users, ascending in user index
 * (user 0 is decoded last by SIC).  half_dist[k] = sqrt(3 P_k / (M - 1)) is
 * the half minimum distance of user k's constellation.
 */
struct PowerAllocation {
    double total = 0.0;
    std::vector<double> per_user;
    std::vector<double> half_dist;

    std::size_t users() const { return per_user.size(); }

    /// Builds an allocation from explicit powers (no SIC ordering required).
    static PowerAllocation from_powers(std::vector<double> powers, int order)
    {
        if (powers.empty()) throw InvalidConfigError("allocation needs at least one user");
        const QamConstellation qam(order);
        PowerAllocation a;
        a.total = 0.0;
        for (double p : powers) {
            if (!(p >= 0.0) || !std::isfinite(p)) throw InvalidConfigError("powers must be finite and >= 0");
            a.total += p;
        }
        a.per_user = std::move(powers);
        a.half_dist.reserve(a.per_user.size());
        for (double p : a.per_user) a.half_dist.push_back(std::sqrt(3.0 * p / (order - 1)));
        return a;
    }

    /// Strictly ascending powers, the order SIC relies on.
    bool is_sic_ordered() const
    {
        for (std::size_t k = 1; k < per_user.size(); ++k)
            if (!(per_user[k] > per_user[k - 1])) return false;
        return true;
    }
};

/*
 * SER-safe split: sqrt(P_k) = A_max sum_{i<k} sqrt(P_i) with equality, scaled
 * so the powers sum to P_n.  The ratios x_k = sqrt(P_k / P_1) follow
 * x_1 = 1, x_k = A_max (1 + A_max)^{k-2}.  `alloc_order` selects the QAM
 * whose A_max drives the split; `order` sets half_dist.
 */
inline PowerAllocation allocate_theorem1(double total_power, int users, int order, int alloc_order)
{
    if (users <= 0) throw InvalidConfigError("K_I must be >= 1");
    if (!(total_power > 0.0) || !std::isfinite(total_power)) throw InvalidConfigError("P_n must be > 0");
    const double a = a_max(alloc_order);
    std::vector<double> ratio(users);
    double prefix = 0.0;
    for (int k = 0; k < users; ++k) {
        ratio[k] = k == 0 ? 1.0 : a * prefix;
        prefix += ratio[k];
    }
    double norm = 0.0;
    for (double x : ratio) norm += x * x;
    const double p1 = total_power / norm;
    std::vector<double> powers(users);
    for (int k = 0; k < users; ++k) powers[k] = p1 * ratio[k] * ratio[k];
    auto alloc = PowerAllocation::from_powers(std::move(powers), order);
    alloc.total = total_power;
    return alloc;
}

inline PowerAllocation allocate_theorem1(double total_power, int users, int order)
{
    return allocate_theorem1(total_power, users, order, order);
}

/// True iff sqrt(P_k) >= A_max sum_{i<k} sqrt(P_i) for every k >= 2, with 1e-9 relative slack.
inline bool check_distortion_bound(const PowerAllocation& alloc, int order)
{
    const double a = a_max(order);
    double prefix = 0.0;
    for (std::size_t k = 0; k < alloc.per_user.size(); ++k) {
        const double root = std::sqrt(alloc.per_user[k]);
        if (k > 0 && root < a * prefix * (1.0 - 1e-9)) return false;
        prefix += root;
    }
    return true;
}

// =======================================================================
// Equal-SINR benchmark
// =======================================================================

/// SINR of every user under `conv`, for gains h (linear) and noise power sigma2 (W).
inline std::vector<double> sinr_per_user(std::span<const double> powers, std::span<const double> gains,
                                         double sigma2, SinrConvention conv)
{
    std::vector<double> out(powers.size());
    for (std::size_t k = 0; k < powers.size(); ++k) {
        double interference = 0.0;
        for (std::size_t i = 0; i < k; ++i)
            interference += (conv == SinrConvention::interferer ? gains[i] : gains[k]) * powers[i];
        out[k] = gains[k] * powers[k] / (interference + sigma2);
    }
    return out;
}

/*
 * Powers giving every WIT user the same SINR gamma with sum P_n.  For a fixed
 * gamma the powers follow by forward substitution,
 *     P_k = gamma (I_k + sigma2) / h_k,
 * and their sum is strictly increasing in gamma, so gamma is found by bisection.
 * SIC decodes users of higher power first; a result that is not strictly
 * ascending in k is rejected.
 */
inline PowerAllocation allocate_equal_sinr(double total_power, std::span<const double> gains,
                                           double sigma2, int order,
                                           SinrConvention conv = SinrConvention::interferer)
{
    if (gains.empty()) throw InvalidConfigError("need at least one WIT user");
    if (!(total_power > 0.0)) throw InvalidConfigError("P_n must be > 0");
    for (double h : gains)
        if (!(h > 0.0) || !std::isfinite(h)) throw InfeasibleAllocationError("gains must be positive");
    if (!(sigma2 >= 0.0)) throw InfeasibleAllocationError("noise power must be >= 0");

    const std::size_t users = gains.size();
    auto powers_for = [&](double gamma) {
        std::vector<double> p(users);
        for (std::size_t k = 0; k < users; ++k) {
            double interference = 0.0;
            for (std::size_t i = 0; i < k; ++i)
                interference += (conv == SinrConvention::interferer ? gains[i] : gains[k]) * p[i];
            p[k] = gamma * (interference + sigma2) / gains[k];
        }
        return p;
    };
    auto sum_for = [&](double gamma) {
        const auto p = powers_for(gamma);
        return std::accumulate(p.begin(), p.end(), 0.0);
    };

    std::vector<double> powers;
    if (users == 1) {
        powers = {total_power};
    } else if (sigma2 == 0.0) {
        // Without noise user 0's SINR is unbounded; no common value exists.
        throw InfeasibleAllocationError("equal-SINR needs sigma2 > 0 for more than one user");
    } else {
        double lo = 0.0;
        double hi = 1.0;
        while (sum_for(hi) < total_power) {
            hi *= 2.0;
            if (!std::isfinite(hi)) throw InfeasibleAllocationError("equal-SINR search diverged");
        }
        for (int it = 0; it < 400 && hi - lo > 1e-15 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (sum_for(mid) < total_power ? lo : hi) = mid;
        }
        powers = powers_for(0.5 * (lo + hi));
        const double s = std::accumulate(powers.begin(), powers.end(), 0.0);
        for (auto& p : powers) p *= total_power / s;
    }

    auto alloc = PowerAllocation::from_powers(std::move(powers), order);
    alloc.total = total_power;
    if (!alloc.is_sic_ordered())
        throw InfeasibleAllocationError("equal-SINR powers are not ascending in user index");
    return alloc;
}

} // namespace swipt
