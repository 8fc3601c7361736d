#pragma once

#include <swipt/common.hpp>

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace swipt {

// =======================================================================
// Square M-QAM constellation
// =======================================================================

/*
 * Symbol index i in [0, M) splits into an in-phase code (i % m) and a
 * quadrature code (i / m), with m = sqrt(M).  Each axis code is a Gray
 * codeword: the level position p (0 = most negative level) satisfies
 * gray(p) = code, so neighbouring levels differ in exactly one bit.  Levels
 * are the normalised amplitudes 2p + 1 - m, i.e. {1-m, 3-m, ..., m-1}.
 */
class QamConstellation {
public:
    explicit QamConstellation(int order)
        : order_(order)
    {
        if (order < 4) throw InvalidOrderError("QAM order must be >= 4");
        side_ = static_cast<int>(std::lround(std::sqrt(static_cast<double>(order))));
        if (side_ * side_ != order) throw InvalidOrderError("QAM order must be a perfect square");
        levels_.resize(side_);
        code_of_pos_.resize(side_);
        pos_of_code_.resize(side_);
        for (int p = 0; p < side_; ++p) {
            levels_[p] = static_cast<double>(2 * p + 1 - side_);
            const int g = p ^ (p >> 1);
            code_of_pos_[p] = g;
            pos_of_code_[g] = p;
        }
    }

    int order() const { return order_; }
    int side() const { return side_; }

    /// Per-axis normalised levels, ascending.
    std::span<const double> alphabet() const { return levels_; }

    /// Largest normalised amplitude sqrt(2) (sqrt(M) - 1).
    double a_max() const { return std::sqrt(2.0) * (side_ - 1); }

    /// Mean of |point|^2 over all M points, 2 (M - 1) / 3.
    double mean_energy() const { return 2.0 * (order_ - 1) / 3.0; }

    cplx point(int index) const
    {
        if (index < 0 || index >= order_) throw InvalidSymbolError("symbol index out of range");
        const int pi_ = pos_of_code_[index % side_];
        const int pq = pos_of_code_[index / side_];
        return {levels_[pi_], levels_[pq]};
    }

    int index_of(int pos_i, int pos_q) const
    {
        return code_of_pos_[pos_q] * side_ + code_of_pos_[pos_i];
    }

    /// Nearest point on the normalised grid; ties go to the lowest index.
    int detect(cplx z) const
    {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw InvalidSampleError("non-finite sample");
        // Square grid: the 2-D nearest neighbour is the per-axis nearest
        // level.  The lowest overall index among tied points is the lowest
        // Q code combined with the lowest I code, since index = q*m + i.
        return code_of_pos_[nearest_pos(z.imag())] * side_ + code_of_pos_[nearest_pos(z.real())];
    }

private:
    int nearest_pos(double x) const
    {
        int best = 0;
        double best_d = std::abs(x - levels_[0]);
        for (int p = 1; p < side_; ++p) {
            const double d = std::abs(x - levels_[p]);
            if (d < best_d || (d == best_d && code_of_pos_[p] < code_of_pos_[best])) {
                best = p;
                best_d = d;
            }
        }
        return best;
    }

    int order_;
    int side_;
    std::vector<double> levels_;
    std::vector<int> code_of_pos_;
    std::vector<int> pos_of_code_;
};

/// sqrt(2) (sqrt(M) - 1) for a square M-QAM.
inline double a_max(int order) { return QamConstellation(order).a_max(); }

// =======================================================================
// Symbols and blocks
// =======================================================================

/// Normalised symbol A e^{j phi}; the power scale d is applied at superposition.
struct ModSymbol {
    double amp = 0.0;
    double phase = 0.0;

    cplx value() const { return std::polar(amp, phase); }
};

inline ModSymbol to_mod_symbol(cplx p)
{
    return {std::abs(p), wrap_angle(std::arg(p))};
}

/// L consecutive symbols of one user.  `user` and `original_index` are 0-based.
struct SymbolBlock {
    int user = 0;
    int original_index = 0;
    std::vector<ModSymbol> symbols;
    std::vector<std::uint16_t> indices;

    std::size_t size() const { return symbols.size(); }
};

template <class IndexRange>
SymbolBlock modulate_block(const IndexRange& indices, const QamConstellation& qam, int user,
                           int original_index)
{
    SymbolBlock block;
    block.user = user;
    block.original_index = original_index;
    block.symbols.reserve(std::size(indices));
    block.indices.reserve(std::size(indices));
    for (auto i : indices) {
        const int idx = static_cast<int>(i);
        block.symbols.push_back(to_mod_symbol(qam.point(idx)));
        block.indices.push_back(static_cast<std::uint16_t>(idx));
    }
    return block;
}

inline SymbolBlock modulate_block(std::span<const int> indices, int order, int user,
                                  int original_index)
{
    return modulate_block(indices, QamConstellation(order), user, original_index);
}

inline int ml_detect(cplx point, int order) { return QamConstellation(order).detect(point); }

} // namespace swipt
