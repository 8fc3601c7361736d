#pragma once

#include <swipt/common.hpp>
#include <swipt/modem.hpp>
#include <swipt/power.hpp>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace swipt {

// =======================================================================
// Rotation and superposition
// =======================================================================

/// Per-carrier, per-user rotation angles in [-pi, pi).  `quant_levels` > 0
/// means the angles were snapped to the centres of D equal regions.
struct RotationMatrix {
    int carriers = 0;
    int users = 0;
    std::vector<double> angles;
    int quant_levels = 0;

    RotationMatrix() = default;
    RotationMatrix(int n, int k)
        : carriers(n), users(k), angles(static_cast<std::size_t>(n) * k, 0.0)
    {
    }

    double& at(int carrier, int user) { return angles[static_cast<std::size_t>(carrier) * users + user]; }
    double at(int carrier, int user) const { return angles[static_cast<std::size_t>(carrier) * users + user]; }

    std::span<const double> carrier(int n) const
    {
        return {angles.data() + static_cast<std::size_t>(n) * users, static_cast<std::size_t>(users)};
    }
};

inline SymbolBlock rotate_block(const SymbolBlock& block, double theta)
{
    SymbolBlock out = block;
    for (auto& s : out.symbols) s.phase = wrap_angle(s.phase + theta);
    return out;
}

struct SuperTerm {
    double scale = 0.0;
    double amp = 0.0;
    double phase = 0.0;
};

/// One superposition symbol: its per-user terms and their complex sum.
struct SuperSymbol {
    std::vector<SuperTerm> terms;
    cplx value{0.0, 0.0};
};

using BlockSpan = std::span<const SymbolBlock* const>;

inline std::vector<const SymbolBlock*> block_ptrs(std::span<const SymbolBlock> blocks)
{
    std::vector<const SymbolBlock*> out;
    out.reserve(blocks.size());
    for (const auto& b : blocks) out.push_back(&b);
    return out;
}

inline std::size_t common_length(BlockSpan blocks)
{
    if (blocks.empty()) throw InvalidFrameError("no blocks to superimpose");
    const std::size_t len = blocks.front()->size();
    for (const auto* b : blocks)
        if (b->size() != len) throw InvalidFrameError("blocks differ in length");
    return len;
}

inline std::vector<SuperSymbol> superimpose(BlockSpan blocks, std::span<const double> scales,
                                            std::span<const double> thetas)
{
    const std::size_t len = common_length(blocks);
    if (scales.size() != blocks.size() || thetas.size() != blocks.size())
        throw InvalidFrameError("allocation / angle count does not match user count");
    std::vector<SuperSymbol> out(len);
    for (std::size_t l = 0; l < len; ++l) {
        auto& s = out[l];
        s.terms.reserve(blocks.size());
        for (std::size_t k = 0; k < blocks.size(); ++k) {
            const auto& sym = blocks[k]->symbols[l];
            const SuperTerm t{scales[k], sym.amp, wrap_angle(sym.phase + thetas[k])};
            s.value += t.scale * std::polar(t.amp, t.phase);
            s.terms.push_back(t);
        }
    }
    return out;
}

inline std::vector<SuperSymbol> superimpose(BlockSpan blocks, const PowerAllocation& alloc,
                                            std::span<const double> thetas)
{
    return superimpose(blocks, std::span<const double>(alloc.half_dist), thetas);
}

// =======================================================================
// Closed-form single-user angle
// =======================================================================

struct AngleUpdate {
    double theta = 0.0;
    bool degenerate = false;
};

/*
 * Best theta_k with the other angles fixed.  The energy terms that depend on
 * theta_k collapse to 2 Re(e^{j theta_k} S) with
 *     S = sum_l sum_{i != k} alpha_{i,l} e^{j beta_{i,l}},
 *     alpha = d_k d_i A_k A_i,  beta = phi_k - phi_i - theta_i,
 * maximised by theta_k = -atan2(Im S, Re S).  The two-argument form picks the
 * maximiser rather than the minimiser that a plain arctangent can return.
 */
inline AngleUpdate optimal_angle(int k, BlockSpan blocks, std::span<const double> scales,
                                 std::span<const double> thetas)
{
    const std::size_t len = common_length(blocks);
    double s_re = 0.0;
    double s_im = 0.0;
    double weight = 0.0;
    for (std::size_t l = 0; l < len; ++l) {
        const auto& sk = blocks[k]->symbols[l];
        for (std::size_t i = 0; i < blocks.size(); ++i) {
            if (static_cast<int>(i) == k) continue;
            const auto& si = blocks[i]->symbols[l];
            const double alpha = scales[k] * scales[i] * sk.amp * si.amp;
            const double beta = sk.phase - si.phase - thetas[i];
            s_re += alpha * std::cos(beta);
            s_im += alpha * std::sin(beta);
            weight += std::abs(alpha);
        }
    }
    if (weight == 0.0 || std::hypot(s_re, s_im) <= 1e-14 * weight) return {0.0, true};
    return {wrap_angle(-std::atan2(s_im, s_re)), false};
}

inline AngleUpdate optimal_angle(int k, BlockSpan blocks, const PowerAllocation& alloc,
                                 std::span<const double> thetas)
{
    return optimal_angle(k, blocks, std::span<const double>(alloc.half_dist), thetas);
}

// =======================================================================
// Per-carrier energy as a quadratic form
// =======================================================================

/*
 * With c_{k,l} = d_k A_{k,l} e^{j phi_{k,l}}, the carrier energy is
 *     E(theta) = T/2 sum_l |sum_k c_{k,l} e^{j theta_k}|^2
 *              = T/2 sum_{k,i} Re(G_{k,i} e^{j(theta_k - theta_i)}),
 * with G_{k,i} = sum_l c_{k,l} conj(c_{i,l}).  Building G once makes every
 * angle update O(K_I) instead of O(K_I L).
 */
class CarrierGram {
public:
    CarrierGram(BlockSpan blocks, std::span<const double> scales, double symbol_period)
        : users_(static_cast<int>(blocks.size())), half_t_(0.5 * symbol_period),
          gram_(static_cast<std::size_t>(users_) * users_)
    {
        const std::size_t len = common_length(blocks);
        if (scales.size() != blocks.size()) throw InvalidFrameError("scale count does not match user count");
        std::vector<cplx> c(static_cast<std::size_t>(users_) * len);
        std::vector<double> mag_sum(len, 0.0);
        for (int k = 0; k < users_; ++k)
            for (std::size_t l = 0; l < len; ++l) {
                const auto& s = blocks[k]->symbols[l];
                c[k * len + l] = scales[k] * std::polar(s.amp, s.phase);
                mag_sum[l] += scales[k] * s.amp;
            }
        for (int k = 0; k < users_; ++k)
            for (int i = k; i < users_; ++i) {
                cplx g{0.0, 0.0};
                for (std::size_t l = 0; l < len; ++l) g += c[k * len + l] * std::conj(c[i * len + l]);
                at(k, i) = g;
                at(i, k) = std::conj(g);
            }
        for (double m : mag_sum) bound_ += half_t_ * m * m;
    }

    int users() const { return users_; }

    double energy(std::span<const double> thetas) const
    {
        double e = 0.0;
        for (int k = 0; k < users_; ++k) {
            e += at(k, k).real();
            for (int i = k + 1; i < users_; ++i)
                e += 2.0 * (at(k, i) * std::polar(1.0, thetas[k] - thetas[i])).real();
        }
        return half_t_ * e;
    }

    /// Coherent-sum upper bound T/2 sum_l (sum_k d_k A_{k,l})^2.
    double upper_bound() const { return bound_; }

    AngleUpdate best_angle(int k, std::span<const double> thetas) const
    {
        cplx s{0.0, 0.0};
        double weight = 0.0;
        for (int i = 0; i < users_; ++i) {
            if (i == k) continue;
            s += at(k, i) * std::polar(1.0, -thetas[i]);
            weight += std::abs(at(k, i));
        }
        if (weight == 0.0 || std::abs(s) <= 1e-14 * weight) return {0.0, true};
        return {wrap_angle(-std::arg(s)), false};
    }

private:
    cplx& at(int k, int i) { return gram_[static_cast<std::size_t>(k) * users_ + i]; }
    const cplx& at(int k, int i) const { return gram_[static_cast<std::size_t>(k) * users_ + i]; }

    int users_;
    double half_t_;
    double bound_ = 0.0;
    std::vector<cplx> gram_;
};

// =======================================================================
// Alternating optimisation
// =======================================================================

struct RotationOptions {
    double lambda = 1e-3;          ///< convergence accuracy on every angle (rad)
    int max_sweeps = 100;
    int restarts = 3;
    double symbol_period = 1e-6;   ///< T (s)
};

struct AngleSolution {
    std::vector<double> thetas;
    double utility = 0.0;
    int sweeps = 0;
    std::vector<double> update_trace;  ///< objective after each single-angle update
    std::vector<double> sweep_trace;   ///< objective after each full sweep
};

/*
 * Coordinate ascent over the K_I angles: random start in [-pi, pi), then
 * sweeps k = 0..K_I-1 with the closed-form update until no angle moves by
 * lambda or more (wrapped difference) across a sweep.  Each update is an
 * exact coordinate maximiser, so the objective never decreases and stays
 * below the coherent-sum bound; both are checked at every step.
 */
inline AngleSolution optimize_angles(const CarrierGram& gram, const RotationOptions& opt, Rng& rng)
{
    if (!(opt.lambda > 0.0)) throw InvalidConfigError("lambda must be > 0");
    const int users = gram.users();
    AngleSolution sol;
    sol.thetas.resize(users);
    for (auto& t : sol.thetas) t = uniform_angle(rng);

    const double bound = gram.upper_bound();
    const double slack = 1e-12 * std::max(bound, 1e-300);
    double current = gram.energy(sol.thetas);
    std::vector<double> previous;
    while (true) {
        if (sol.sweeps >= opt.max_sweeps) throw NonConvergenceError("rotation angles did not converge");
        previous = sol.thetas;
        for (int k = 0; k < users; ++k) {
            sol.thetas[k] = gram.best_angle(k, sol.thetas).theta;
            const double next = gram.energy(sol.thetas);
            if (next < current - slack) throw std::logic_error("angle update decreased the carrier energy");
            if (next > bound + slack) throw std::logic_error("carrier energy exceeds the coherent-sum bound");
            current = next;
            sol.update_trace.push_back(current);
        }
        ++sol.sweeps;
        sol.sweep_trace.push_back(current);
        double moved = 0.0;
        for (int k = 0; k < users; ++k) moved = std::max(moved, angle_distance(sol.thetas[k], previous[k]));
        if (moved < opt.lambda) break;
    }
    sol.utility = current;
    return sol;
}

inline AngleSolution optimize_angles(BlockSpan blocks, std::span<const double> scales,
                                     const RotationOptions& opt, Rng& rng)
{
    return optimize_angles(CarrierGram(blocks, scales, opt.symbol_period), opt, rng);
}

inline AngleSolution optimize_angles(BlockSpan blocks, const PowerAllocation& alloc,
                                     const RotationOptions& opt, std::uint64_t seed)
{
    Rng rng = make_stream(seed);
    return optimize_angles(blocks, std::span<const double>(alloc.half_dist), opt, rng);
}

/*
 * eta_n: best energy over `restarts` seeded runs.  Restart r draws its start
 * from make_stream(seed, r), so the value is a pure function of the blocks
 * for a given seed.
 */
inline AngleSolution carrier_utility(const CarrierGram& gram, const RotationOptions& opt, std::uint64_t seed)
{
    if (opt.restarts < 1) throw InvalidConfigError("restarts must be >= 1");
    std::optional<AngleSolution> best;
    for (int r = 0; r < opt.restarts; ++r) {
        Rng rng = make_stream(seed, static_cast<std::uint64_t>(r));
        auto sol = optimize_angles(gram, opt, rng);
        if (!best || sol.utility > best->utility) best = std::move(sol);
    }
    return *best;
}

inline AngleSolution carrier_utility(BlockSpan blocks, std::span<const double> scales,
                                     const RotationOptions& opt, std::uint64_t seed)
{
    return carrier_utility(CarrierGram(blocks, scales, opt.symbol_period), opt, seed);
}

inline AngleSolution carrier_utility(BlockSpan blocks, const PowerAllocation& alloc,
                                     const RotationOptions& opt, std::uint64_t seed)
{
    return carrier_utility(blocks, std::span<const double>(alloc.half_dist), opt, seed);
}

} // namespace swipt
