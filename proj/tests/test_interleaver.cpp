#include <swipt/interleaver.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>

using namespace swipt;

namespace {

// Coherent energy of the unrotated, equal-weight sum: sum_l |sum_k s_k|^2.
double plain_energy(std::span<const SymbolBlock* const> col)
{
    double e = 0.0;
    for (std::size_t l = 0; l < col.front()->size(); ++l) {
        cplx s{0.0, 0.0};
        for (const auto* b : col) s += b->symbols[l].value();
        e += std::norm(s);
    }
    return e;
}

int index_of(double re, double im)
{
    const QamConstellation q(4);
    for (int i = 0; i < 4; ++i)
        if (q.point(i) == cplx(re, im)) return i;
    return -1;
}

Frame random_frame(int users, int carriers, int len, int order, std::uint64_t seed)
{
    Rng rng = make_stream(seed);
    std::uniform_int_distribution<int> pick(0, order - 1);
    const QamConstellation q(order);
    Frame f(users, carriers, static_cast<std::size_t>(len));
    for (int k = 0; k < users; ++k)
        for (int m = 0; m < carriers; ++m) {
            std::vector<int> idx(len);
            for (auto& i : idx) i = pick(rng);
            f.at(k, m) = modulate_block(idx, q, k, m);
        }
    return f;
}

InterleavingTensor random_tensor(int users, int carriers, Rng& rng)
{
    std::vector<std::vector<int>> p(users, std::vector<int>(carriers));
    for (auto& row : p) {
        std::iota(row.begin(), row.end(), 0);
        std::shuffle(row.begin(), row.end(), rng);
    }
    return InterleavingTensor(p);
}

// Two users, two carriers, L = 2.  Without interleaving carrier 1 cancels completely.
Frame collision_frame()
{
    const int pp = index_of(1, 1);
    const int mm = index_of(-1, -1);
    Frame f(2, 2, 2);
    f.at(0, 0) = modulate_block(std::vector<int>{pp, mm}, 4, 0, 0);
    f.at(0, 1) = modulate_block(std::vector<int>{pp, pp}, 4, 0, 1);
    f.at(1, 0) = modulate_block(std::vector<int>{mm, pp}, 4, 1, 0);
    f.at(1, 1) = modulate_block(std::vector<int>{pp, mm}, 4, 1, 1);
    return f;
}

double total_of(const Frame& f, const InterleavingTensor& t)
{
    const Frame c = apply_interleaving(t, f);
    std::vector<double> u;
    for (int n = 0; n < f.carriers(); ++n) u.push_back(plain_energy(c.column(n)));
    return detail::ordered_sum(u);
}

} // namespace

TEST(Interleaver, IdentityTensor)
{
    const auto t1 = identity_tensor(1, 1);
    EXPECT_EQ(t1.b(0, 0, 0), 1);
    const auto t = identity_tensor(2, 3);
    for (int k = 0; k < 2; ++k)
        for (int m = 0; m < 3; ++m)
            for (int n = 0; n < 3; ++n) EXPECT_EQ(t.b(k, m, n), m == n ? 1 : 0);
}

TEST(Interleaver, TensorConstraintsHold)
{
    Rng rng = make_stream(3);
    for (int trial = 0; trial < 50; ++trial) {
        const auto t = random_tensor(3, 5, rng);
        for (int k = 0; k < 3; ++k)
            for (int i = 0; i < 5; ++i) {
                int per_carrier = 0;
                int per_block = 0;
                for (int j = 0; j < 5; ++j) {
                    per_carrier += t.b(k, j, i);
                    per_block += t.b(k, i, j);
                }
                EXPECT_EQ(per_carrier, 1);
                EXPECT_EQ(per_block, 1);
                EXPECT_EQ(t.carrier_of(k, t.block_on(k, i)), i);
            }
    }
}

TEST(Interleaver, RejectsInvalidTensors)
{
    EXPECT_THROW(InterleavingTensor({{0, 0}}), InvalidConfigError);
    EXPECT_THROW(InterleavingTensor({{0, 2}}), InvalidConfigError);
    EXPECT_THROW(InterleavingTensor({{0, 1}, {0}}), InvalidConfigError);
    EXPECT_THROW(InterleavingTensor(std::vector<std::vector<int>>{}), InvalidConfigError);
    const Frame f = random_frame(2, 3, 4, 4, 1);
    EXPECT_THROW(apply_interleaving(identity_tensor(2, 2), f), InvalidFrameError);
}

TEST(Interleaver, IdentityLeavesFrameUnchanged)
{
    const Frame f = random_frame(3, 4, 5, 16, 2);
    EXPECT_TRUE(apply_interleaving(identity_tensor(3, 4), f) == f);
    EXPECT_TRUE(deinterleave(identity_tensor(3, 4), f) == f);
}

TEST(Interleaver, SwapMovesSecondBlockToFirstCarrier)
{
    const Frame f = collision_frame();
    const InterleavingTensor swap({{0, 1}, {1, 0}});
    const Frame c = apply_interleaving(swap, f);
    EXPECT_EQ(c.at(1, 0).original_index, 1);
    EXPECT_EQ(c.at(1, 0).indices, f.at(1, 1).indices);
    EXPECT_TRUE(deinterleave(swap, c) == f);
}

TEST(Interleaver, RandomRoundTripAndMultiset)
{
    Rng rng = make_stream(4);
    for (int trial = 0; trial < 30; ++trial) {
        const Frame f = random_frame(3, 6, 3, 4, 100 + trial);
        const auto t = random_tensor(3, 6, rng);
        const Frame c = apply_interleaving(t, f);
        EXPECT_TRUE(deinterleave(t, c) == f);
        EXPECT_TRUE(apply_interleaving(t, deinterleave(t, c)) == c);
        std::multiset<std::pair<int, int>> before, after;
        for (int k = 0; k < 3; ++k)
            for (int n = 0; n < 6; ++n) {
                before.emplace(f.at(k, n).user, f.at(k, n).original_index);
                after.emplace(c.at(k, n).user, c.at(k, n).original_index);
            }
        EXPECT_EQ(before, after);
        for (int k = 0; k < 3; ++k) {
            std::vector<SymbolBlock> blocks;
            for (int n = 0; n < 6; ++n) blocks.push_back(c.at(k, n));
            const auto back = deinterleave_user(t, k, blocks);
            for (int m = 0; m < 6; ++m) EXPECT_EQ(back[m].indices, f.at(k, m).indices);
        }
    }
}

TEST(Interleaver, ExhaustiveFindsCollisionAvoidingSwap)
{
    const Frame f = collision_frame();
    const auto r = exhaustive_search(f, plain_energy);
    EXPECT_EQ(r.tensor, InterleavingTensor({{0, 1}, {1, 0}}));
    EXPECT_DOUBLE_EQ(r.total, 24.0);
    EXPECT_DOUBLE_EQ(total_of(f, identity_tensor(2, 2)), 8.0);
}

TEST(Interleaver, SingleUserIsMappingInvariant)
{
    const Frame f = random_frame(1, 4, 6, 16, 5);
    const auto ex = exhaustive_search(f, plain_energy);
    EXPECT_EQ(ex.tensor, identity_tensor(1, 4));
    const auto gr = greedy_search(f, plain_energy);
    EXPECT_DOUBLE_EQ(gr.total, ex.total);
}

TEST(Interleaver, SingleCarrier)
{
    const Frame f = random_frame(3, 1, 6, 4, 6);
    const auto ex = exhaustive_search(f, plain_energy);
    const auto gr = greedy_search(f, plain_energy);
    EXPECT_EQ(ex.tensor, identity_tensor(3, 1));
    EXPECT_EQ(gr.tensor, ex.tensor);
    EXPECT_DOUBLE_EQ(ex.total, plain_energy(f.column(0)));
    EXPECT_DOUBLE_EQ(gr.total, ex.total);
}

TEST(Interleaver, ExhaustiveIsTheMaximumOverAllTensors)
{
    // Independent oracle: enumerate user 1 and 2 permutations by brute force (user 0 fixed
    // costs nothing, since only relative placement matters, but enumerate it anyway).
    const Frame f = random_frame(2, 3, 4, 4, 7);
    std::vector<int> p0{0, 1, 2};
    double best = -1.0;
    do {
        std::vector<int> p1{0, 1, 2};
        do best = std::max(best, total_of(f, InterleavingTensor({p0, p1})));
        while (std::next_permutation(p1.begin(), p1.end()));
    } while (std::next_permutation(p0.begin(), p0.end()));
    const auto r = exhaustive_search(f, plain_energy);
    EXPECT_DOUBLE_EQ(r.total, best);
    EXPECT_DOUBLE_EQ(total_of(f, r.tensor), r.total);
}

TEST(Interleaver, GreedyNeverBeatsExhaustive)
{
    double ratio_sum = 0.0;
    int trials = 0;
    for (int users = 1; users <= 3; ++users)
        for (int carriers = 1; carriers <= 4; ++carriers)
            for (int s = 0; s < 5; ++s) {
                const Frame f = random_frame(users, carriers, 8, 4, 1000 * users + 10 * carriers + s);
                const auto ex = exhaustive_search(f, plain_energy);
                const auto gr = greedy_search(f, plain_energy);
                EXPECT_LE(gr.total, ex.total);
                EXPECT_GE(ex.total, total_of(f, identity_tensor(users, carriers)));
                EXPECT_DOUBLE_EQ(total_of(f, gr.tensor), gr.total);
                ratio_sum += gr.total / ex.total;
                ++trials;
            }
    EXPECT_GE(ratio_sum / trials, 0.98);
}

TEST(Interleaver, OracleCallCounts)
{
    for (int users = 1; users <= 3; ++users)
        for (int carriers = 1; carriers <= 5; ++carriers) {
            const Frame f = random_frame(users, carriers, 2, 4, 9);
            std::uint64_t expected = 0;
            for (int i = 1; i <= carriers; ++i) expected += static_cast<std::uint64_t>(std::pow(i, users));
            std::uint64_t counted = 0;
            const CarrierUtility counting = [&](std::span<const SymbolBlock* const> c) {
                ++counted;
                return plain_energy(c);
            };
            const auto gr = greedy_search(f, counting);
            EXPECT_EQ(gr.oracle_calls, expected);
            EXPECT_EQ(counted, expected);
            if (carriers <= 4) {
                const auto ex = exhaustive_search(f, plain_energy);
                EXPECT_LE(ex.oracle_calls, static_cast<std::uint64_t>(std::pow(carriers, users)));
            }
        }
}

TEST(Interleaver, EnumerationCaps)
{
    const Frame f = random_frame(3, 10, 1, 4, 10);
    EXPECT_THROW(exhaustive_search(f, plain_energy), SearchTooLargeError);
    EXPECT_THROW(greedy_search(f, plain_energy, 100.0), SearchTooLargeError);
    EXPECT_NO_THROW(greedy_search(f, plain_energy));
}
