#pragma once

#include <swipt/common.hpp>
#include <swipt/modem.hpp>

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <vector>

namespace swipt {

// =======================================================================
// Frame
// =======================================================================

/*
 * K_I x N grid of symbol blocks.  In an original-ordered frame, at(k, m) is
 * user k's m-th block; in a carrier-ordered frame, at(k, n) is the block user k
 * sends on carrier n (its `original_index` tells which one).
 */
class Frame {
public:
    Frame() = default;
    Frame(int users, int carriers, std::size_t block_len)
        : users_(users), carriers_(carriers), block_len_(block_len),
          blocks_(static_cast<std::size_t>(users) * carriers)
    {
        if (users < 1 || carriers < 1) throw InvalidFrameError("frame needs users, carriers >= 1");
    }

    int users() const { return users_; }
    int carriers() const { return carriers_; }
    std::size_t block_len() const { return block_len_; }

    SymbolBlock& at(int user, int slot) { return blocks_[index(user, slot)]; }
    const SymbolBlock& at(int user, int slot) const { return blocks_[index(user, slot)]; }

    /// One block per user for a carrier (or original position) `slot`.
    std::vector<const SymbolBlock*> column(int slot) const
    {
        std::vector<const SymbolBlock*> col(users_);
        for (int k = 0; k < users_; ++k) col[k] = &at(k, slot);
        return col;
    }

    /// Throws unless every block is populated with block_len symbols.
    void validate() const
    {
        for (const auto& b : blocks_)
            if (b.symbols.size() != block_len_ || b.indices.size() != block_len_)
                throw InvalidFrameError("frame block has wrong length");
    }

    bool operator==(const Frame& o) const
    {
        if (users_ != o.users_ || carriers_ != o.carriers_ || block_len_ != o.block_len_) return false;
        for (std::size_t i = 0; i < blocks_.size(); ++i) {
            const auto& a = blocks_[i];
            const auto& b = o.blocks_[i];
            if (a.user != b.user || a.original_index != b.original_index || a.indices != b.indices) return false;
            for (std::size_t l = 0; l < a.symbols.size(); ++l)
                if (a.symbols[l].amp != b.symbols[l].amp || a.symbols[l].phase != b.symbols[l].phase) return false;
        }
        return true;
    }

private:
    std::size_t index(int user, int slot) const
    {
        if (user < 0 || user >= users_ || slot < 0 || slot >= carriers_)
            throw InvalidFrameError("frame index out of range");
        return static_cast<std::size_t>(user) * carriers_ + slot;
    }

    int users_ = 0;
    int carriers_ = 0;
    std::size_t block_len_ = 0;
    std::vector<SymbolBlock> blocks_;
};

// =======================================================================
// InterleavingTensor
// =======================================================================

/*
 * Stored as one permutation per user: perm[k][n] = m means block m of user k
 * goes on carrier n, i.e. b[k][m][n] = 1.  A permutation has exactly one 1 per
 * row and column, so the one-block-per-carrier and send-each-block-once
 * constraints hold by construction.
 */
class InterleavingTensor {
public:
    InterleavingTensor() = default;

    explicit InterleavingTensor(std::vector<std::vector<int>> perms)
        : perms_(std::move(perms))
    {
        if (perms_.empty()) throw InvalidConfigError("tensor needs at least one user");
        const std::size_t n = perms_.front().size();
        if (n == 0) throw InvalidConfigError("tensor needs at least one carrier");
        for (const auto& p : perms_) {
            if (p.size() != n) throw InvalidConfigError("ragged interleaving tensor");
            std::vector<char> seen(n, 0);
            for (int m : p) {
                if (m < 0 || static_cast<std::size_t>(m) >= n || seen[m])
                    throw InvalidConfigError("interleaver row is not a permutation");
                seen[m] = 1;
            }
        }
    }

    static InterleavingTensor identity(int users, int carriers)
    {
        if (users < 1 || carriers < 1) throw InvalidConfigError("K_I, N must be >= 1");
        std::vector<int> id(carriers);
        std::iota(id.begin(), id.end(), 0);
        return InterleavingTensor(std::vector<std::vector<int>>(users, id));
    }

    int users() const { return static_cast<int>(perms_.size()); }
    int carriers() const { return perms_.empty() ? 0 : static_cast<int>(perms_.front().size()); }

    /// Original block index user k sends on carrier n.
    int block_on(int user, int carrier) const { return perms_.at(user).at(carrier); }

    /// Carrier that carries block m of user k.
    int carrier_of(int user, int block) const
    {
        const auto& p = perms_.at(user);
        return static_cast<int>(std::find(p.begin(), p.end(), block) - p.begin());
    }

    /// b[k][m][n] of the dense binary tensor.
    int b(int user, int block, int carrier) const { return block_on(user, carrier) == block ? 1 : 0; }

    const std::vector<int>& permutation(int user) const { return perms_.at(user); }

    bool operator==(const InterleavingTensor&) const = default;

private:
    std::vector<std::vector<int>> perms_;
};

inline InterleavingTensor identity_tensor(int users, int carriers)
{
    return InterleavingTensor::identity(users, carriers);
}

inline void check_dims(const InterleavingTensor& t, const Frame& f)
{
    if (t.users() != f.users() || t.carriers() != f.carriers())
        throw InvalidFrameError("tensor and frame dimensions differ");
}

/// Original-ordered frame -> carrier-ordered frame.
inline Frame apply_interleaving(const InterleavingTensor& t, const Frame& frame)
{
    check_dims(t, frame);
    Frame out(frame.users(), frame.carriers(), frame.block_len());
    for (int k = 0; k < frame.users(); ++k)
        for (int n = 0; n < frame.carriers(); ++n) out.at(k, n) = frame.at(k, t.block_on(k, n));
    return out;
}

/// Carrier-ordered frame -> original order.
inline Frame deinterleave(const InterleavingTensor& t, const Frame& carrier_frame)
{
    check_dims(t, carrier_frame);
    Frame out(carrier_frame.users(), carrier_frame.carriers(), carrier_frame.block_len());
    for (int k = 0; k < carrier_frame.users(); ++k)
        for (int n = 0; n < carrier_frame.carriers(); ++n)
            out.at(k, t.block_on(k, n)) = carrier_frame.at(k, n);
    return out;
}

/// One user's carrier-ordered blocks back to original order.
inline std::vector<SymbolBlock> deinterleave_user(const InterleavingTensor& t, int user,
                                                  const std::vector<SymbolBlock>& carrier_blocks)
{
    if (static_cast<int>(carrier_blocks.size()) != t.carriers())
        throw InvalidFrameError("block count does not match carrier count");
    std::vector<SymbolBlock> out(carrier_blocks.size());
    for (int n = 0; n < t.carriers(); ++n) {
        auto& b = out[t.block_on(user, n)];
        b = carrier_blocks[n];
        b.original_index = t.block_on(user, n);
    }
    return out;
}

// =======================================================================
// Searches
// =======================================================================

/// Utility of one carrier's combination: one block per user, in user order.
using CarrierUtility = std::function<double(std::span<const SymbolBlock* const>)>;

struct SearchResult {
    InterleavingTensor tensor;
    double total = 0.0;
    std::uint64_t oracle_calls = 0;
};

inline constexpr double default_enumeration_cap = 1e7;

namespace detail {

/// Sum in ascending order so that any reordering of the same values gives the
/// bit-identical total (exact ties stay exact across permutations).
inline double ordered_sum(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

inline double pow_count(double base, int exp)
{
    double r = 1.0;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

} // namespace detail

/*
 * Exhaustive search over all (N!)^{K_I} per-user permutation tuples.  Tuples
 * are visited in lexicographic order (user 0's permutation most significant)
 * and only a strictly larger total replaces the incumbent, so ties resolve to
 * the lexicographically smallest tuple.  Utilities are memoised per block
 * combination: only N^{K_I} distinct combinations exist.
 */
inline SearchResult exhaustive_search(const Frame& frame, const CarrierUtility& utility,
                                      double cap = default_enumeration_cap)
{
    frame.validate();
    const int users = frame.users();
    const int n = frame.carriers();
    double fact = 1.0;
    for (int i = 2; i <= n; ++i) fact *= i;
    if (detail::pow_count(fact, users) > cap) throw SearchTooLargeError("exhaustive search exceeds enumeration cap");

    // Memo over combinations: key = sum_k m_k * n^k.
    const auto combos = static_cast<std::size_t>(detail::pow_count(n, users));
    std::vector<double> memo(combos, 0.0);
    std::vector<char> have(combos, 0);
    std::uint64_t calls = 0;
    std::vector<const SymbolBlock*> col(users);
    auto utility_of = [&](const std::vector<int>& blocks) {
        std::size_t key = 0;
        for (int k = users - 1; k >= 0; --k) key = key * n + blocks[k];
        if (!have[key]) {
            for (int k = 0; k < users; ++k) col[k] = &frame.at(k, blocks[k]);
            memo[key] = utility(col);
            have[key] = 1;
            ++calls;
        }
        return memo[key];
    };

    std::vector<int> id(n);
    std::iota(id.begin(), id.end(), 0);
    std::vector<std::vector<int>> perms(users, id);
    std::vector<std::vector<int>> best = perms;
    double best_total = -std::numeric_limits<double>::infinity();
    std::vector<int> blocks(users);
    std::vector<double> per_carrier(n);

    while (true) {
        for (int c = 0; c < n; ++c) {
            for (int k = 0; k < users; ++k) blocks[k] = perms[k][c];
            per_carrier[c] = utility_of(blocks);
        }
        const double total = detail::ordered_sum(per_carrier);
        if (total > best_total) {
            best_total = total;
            best = perms;
        }
        // Odometer over the tuple, last user fastest.
        int k = users - 1;
        while (k >= 0 && !std::next_permutation(perms[k].begin(), perms[k].end())) --k;
        if (k < 0) break;
    }
    return {InterleavingTensor(std::move(best)), best_total, calls};
}

/*
 * Greedy carrier-by-carrier assignment.  Carrier n (in order 0..N-1) tries all
 * (N - n)^{K_I} combinations of still-unscheduled blocks, one per user, and
 * keeps the utility maximiser; the availability mask marks the winners used.
 * Combinations are enumerated with the block-index tuple in lexicographic
 * order and only strict improvements replace the incumbent.
 */
inline SearchResult greedy_search(const Frame& frame, const CarrierUtility& utility,
                                  double cap = default_enumeration_cap)
{
    frame.validate();
    const int users = frame.users();
    const int n = frame.carriers();
    if (detail::pow_count(n, users) > cap) throw SearchTooLargeError("greedy search exceeds enumeration cap");

    std::vector<std::vector<char>> used(users, std::vector<char>(n, 0));
    std::vector<std::vector<int>> perms(users, std::vector<int>(n, -1));
    std::vector<double> chosen(n, 0.0);
    std::uint64_t calls = 0;
    std::vector<const SymbolBlock*> col(users);

    for (int c = 0; c < n; ++c) {
        std::vector<std::vector<int>> free(users);
        for (int k = 0; k < users; ++k)
            for (int m = 0; m < n; ++m)
                if (!used[k][m]) free[k].push_back(m);

        std::vector<std::size_t> pos(users, 0);
        std::vector<int> best_blocks(users);
        double best = -std::numeric_limits<double>::infinity();
        while (true) {
            for (int k = 0; k < users; ++k) col[k] = &frame.at(k, free[k][pos[k]]);
            const double u = utility(col);
            ++calls;
            if (u > best) {
                best = u;
                for (int k = 0; k < users; ++k) best_blocks[k] = free[k][pos[k]];
            }
            int k = users - 1;
            while (k >= 0 && ++pos[k] == free[k].size()) pos[k--] = 0;
            if (k < 0) break;
        }
        for (int k = 0; k < users; ++k) {
            perms[k][c] = best_blocks[k];
            used[k][best_blocks[k]] = 1;
        }
        chosen[c] = best;
    }
    return {InterleavingTensor(std::move(perms)), detail::ordered_sum(chosen), calls};
}

} // namespace swipt
