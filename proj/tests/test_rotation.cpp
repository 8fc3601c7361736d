#include <swipt/rotation.hpp>

#include <gtest/gtest.h>

using namespace swipt;

namespace {

std::vector<SymbolBlock> random_blocks(int users, int len, int order, std::uint64_t seed)
{
    Rng rng = make_stream(seed);
    std::uniform_int_distribution<int> pick(0, order - 1);
    const QamConstellation q(order);
    std::vector<SymbolBlock> out;
    for (int k = 0; k < users; ++k) {
        std::vector<int> idx(len);
        for (auto& i : idx) i = pick(rng);
        out.push_back(modulate_block(idx, q, k, 0));
    }
    return out;
}

SymbolBlock single(double amp, double phase)
{
    SymbolBlock b;
    b.symbols.push_back({amp, phase});
    b.indices.push_back(0);
    return b;
}

// Independent evaluation of the carrier energy: T/2 sum_l |sum_k d_k A e^{j(phi + theta)}|^2.
double direct_energy(BlockSpan blocks, std::span<const double> scales, std::span<const double> thetas, double t)
{
    double e = 0.0;
    for (std::size_t l = 0; l < blocks.front()->size(); ++l) {
        cplx s{0.0, 0.0};
        for (std::size_t k = 0; k < blocks.size(); ++k)
            s += scales[k] * std::polar(blocks[k]->symbols[l].amp, blocks[k]->symbols[l].phase + thetas[k]);
        e += 0.5 * t * std::norm(s);
    }
    return e;
}

} // namespace

TEST(Rotation, RotateBlock)
{
    const auto b = random_blocks(1, 20, 16, 1).front();
    const auto same = rotate_block(b, 0.0);
    for (std::size_t l = 0; l < b.size(); ++l) EXPECT_EQ(same.symbols[l].phase, b.symbols[l].phase);
    const auto twice = rotate_block(rotate_block(b, pi), pi);
    for (std::size_t l = 0; l < b.size(); ++l) {
        EXPECT_LT(angle_distance(twice.symbols[l].phase, b.symbols[l].phase), 1e-12);
        EXPECT_GE(twice.symbols[l].phase, -pi);
        EXPECT_LT(twice.symbols[l].phase, pi);
    }
    EXPECT_NEAR(rotate_block(single(1.0, pi / 4), pi / 2).symbols[0].phase, 3 * pi / 4, 1e-15);
}

TEST(Rotation, SuperimposeBasics)
{
    const auto b = single(std::sqrt(2.0), pi / 4);
    const std::vector<const SymbolBlock*> one{&b};
    const std::vector<double> d{0.7};
    const std::vector<double> zero{0.0};
    EXPECT_NEAR(std::abs(superimpose(one, d, zero)[0].value - 0.7 * std::polar(std::sqrt(2.0), pi / 4)), 0.0, 1e-15);

    const auto a0 = single(1.0, 0.0);
    const auto api = single(1.0, -pi);
    const std::vector<const SymbolBlock*> opposite{&a0, &api};
    const std::vector<double> dd{1.0, 1.0};
    const std::vector<double> zz{0.0, 0.0};
    EXPECT_NEAR(std::abs(superimpose(opposite, dd, zz)[0].value), 0.0, 1e-15);
    const std::vector<const SymbolBlock*> aligned{&a0, &a0};
    EXPECT_NEAR(std::abs(superimpose(aligned, dd, zz)[0].value), 2.0, 1e-15);
}

TEST(Rotation, SuperSymbolValueIsSumOfTerms)
{
    const auto blocks = random_blocks(3, 50, 16, 2);
    const auto ptrs = block_ptrs(blocks);
    const std::vector<double> d{0.3, 0.5, 1.1};
    const std::vector<double> th{0.4, -2.0, 3.0};
    for (const auto& s : superimpose(ptrs, d, th)) {
        cplx sum{0.0, 0.0};
        for (const auto& t : s.terms) {
            sum += t.scale * std::polar(t.amp, t.phase);
            EXPECT_GE(t.phase, -pi);
            EXPECT_LT(t.phase, pi);
        }
        EXPECT_LT(std::abs(sum - s.value), 1e-12);
    }
}

TEST(Rotation, SuperimposeRejectsMismatch)
{
    auto blocks = random_blocks(2, 4, 4, 3);
    const std::vector<double> d{1.0};
    const std::vector<double> th{0.0, 0.0};
    EXPECT_THROW(superimpose(block_ptrs(blocks), d, th), InvalidFrameError);
    blocks[1].symbols.pop_back();
    const std::vector<double> d2{1.0, 1.0};
    EXPECT_THROW(superimpose(block_ptrs(blocks), d2, th), InvalidFrameError);
}

TEST(Rotation, OppositePairRotatesByPi)
{
    const auto a = single(1.0, 0.0);
    const auto b = single(1.0, -pi);
    const std::vector<const SymbolBlock*> col{&a, &b};
    const std::vector<double> d{1.0, 1.0};
    const std::vector<double> th{0.0, 0.0};
    const auto u = optimal_angle(1, col, d, th);
    EXPECT_FALSE(u.degenerate);
    EXPECT_NEAR(u.theta, -pi, 1e-12);
    const std::vector<const SymbolBlock*> same{&a, &a};
    EXPECT_NEAR(optimal_angle(1, same, d, th).theta, 0.0, 1e-15);
}

TEST(Rotation, ClosedFormMatchesGridSearch)
{
    Rng rng = make_stream(11);
    for (int trial = 0; trial < 20; ++trial) {
        const auto blocks = random_blocks(3, 8, trial % 2 ? 16 : 4, 200 + trial);
        const auto ptrs = block_ptrs(blocks);
        const std::vector<double> d{uniform(rng, 0.1, 1), uniform(rng, 0.1, 1), uniform(rng, 0.1, 1)};
        std::vector<double> th{uniform_angle(rng), uniform_angle(rng), uniform_angle(rng)};
        const int k = trial % 3;
        const auto u = optimal_angle(k, ptrs, d, th);
        double best = -1.0;
        double best_theta = 0.0;
        for (double t = -pi; t < pi; t += 1e-4) {
            th[k] = t;
            const double e = direct_energy(ptrs, d, th, 1.0);
            if (e > best) {
                best = e;
                best_theta = t;
            }
        }
        th[k] = u.theta;
        const double closed = direct_energy(ptrs, d, th, 1.0);
        EXPECT_GE(closed, best * (1.0 - 1e-12));
        EXPECT_NEAR(closed, best, 1e-6 * best);
        EXPECT_LT(angle_distance(u.theta, best_theta), 1e-3);
        EXPECT_NEAR(CarrierGram(ptrs, d, 1.0).best_angle(k, th).theta, u.theta, 1e-9);
    }
}

TEST(Rotation, GramEnergyMatchesDirectSum)
{
    Rng rng = make_stream(12);
    for (int trial = 0; trial < 20; ++trial) {
        const auto blocks = random_blocks(1 + trial % 4, 30, 64, 300 + trial);
        const auto ptrs = block_ptrs(blocks);
        std::vector<double> d, th;
        for (std::size_t k = 0; k < blocks.size(); ++k) {
            d.push_back(uniform(rng, 0.1, 2.0));
            th.push_back(uniform_angle(rng));
        }
        const CarrierGram g(ptrs, d, 1e-6);
        const double ref = direct_energy(ptrs, d, th, 1e-6);
        EXPECT_NEAR(g.energy(th), ref, 1e-12 * ref);
        EXPECT_LE(ref, g.upper_bound() * (1 + 1e-12));
    }
}

TEST(Rotation, OptimizeSingleUser)
{
    const auto blocks = random_blocks(1, 40, 16, 13);
    const auto ptrs = block_ptrs(blocks);
    const auto alloc = allocate_theorem1(1.0, 1, 16);
    RotationOptions opt;
    double expected = 0.0;
    for (const auto& s : blocks[0].symbols) expected += 0.5 * opt.symbol_period * alloc.half_dist[0] * alloc.half_dist[0] * s.amp * s.amp;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto sol = optimize_angles(ptrs, alloc, opt, seed);
        EXPECT_NEAR(sol.utility, expected, 1e-12 * expected);
        for (int r : {1, 4}) {
            opt.restarts = r;
            EXPECT_NEAR(carrier_utility(ptrs, alloc, opt, seed).utility, expected, 1e-12 * expected);
        }
    }
}

TEST(Rotation, OppositePairReachesAlignedEnergy)
{
    const auto a = single(std::sqrt(2.0), pi / 4);
    const auto b = single(std::sqrt(2.0), -3 * pi / 4);
    const std::vector<const SymbolBlock*> col{&a, &b};
    const std::vector<double> d{0.4, 0.9};
    RotationOptions opt;
    Rng rng = make_stream(5);
    const auto sol = optimize_angles(col, d, opt, rng);
    const double aligned = 0.5 * opt.symbol_period * std::pow(0.4 * std::sqrt(2.0) + 0.9 * std::sqrt(2.0), 2);
    EXPECT_NEAR(sol.utility, aligned, 1e-12 * aligned);
}

TEST(Rotation, AscentIsMonotoneAndBounded)
{
    for (int order : {4, 16}) {
        const auto alloc = allocate_theorem1(1.0, 3, order);
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const auto blocks = random_blocks(3, 100, order, 400 + seed);
            const auto ptrs = block_ptrs(blocks);
            const CarrierGram g(ptrs, alloc.half_dist, 1e-6);
            RotationOptions opt;
            Rng rng = make_stream(seed);
            const auto sol = optimize_angles(g, opt, rng);
            ASSERT_EQ(sol.update_trace.size(), static_cast<std::size_t>(3 * sol.sweeps));
            for (std::size_t i = 1; i < sol.update_trace.size(); ++i)
                EXPECT_GE(sol.update_trace[i], sol.update_trace[i - 1] - 1e-12 * g.upper_bound());
            EXPECT_LE(sol.utility, g.upper_bound());
            EXPECT_LE(sol.sweeps, 10);
            for (double t : sol.thetas) {
                EXPECT_GE(t, -pi);
                EXPECT_LT(t, pi);
            }
            // Coordinate-wise optimal at the end: no single angle can improve by more than
            // what a move below lambda can buy.
            for (int k = 0; k < 3; ++k) {
                auto th = sol.thetas;
                th[k] = g.best_angle(k, th).theta;
                EXPECT_LE(g.energy(th), sol.utility * (1 + 1e-5));
            }
        }
    }
}

TEST(Rotation, GlobalPhaseInvariance)
{
    const auto blocks = random_blocks(3, 64, 16, 14);
    const auto ptrs = block_ptrs(blocks);
    const std::vector<double> d{0.2, 0.4, 0.9};
    const std::vector<double> th{0.3, -1.2, 2.5};
    std::vector<double> shifted = th;
    for (auto& t : shifted) t = wrap_angle(t + 1.234);
    const auto a = superimpose(ptrs, d, th);
    const auto b = superimpose(ptrs, d, shifted);
    for (std::size_t l = 0; l < a.size(); ++l) EXPECT_NEAR(std::abs(a[l].value), std::abs(b[l].value), 1e-12);
    const CarrierGram g(ptrs, d, 1e-6);
    EXPECT_NEAR(g.energy(th), g.energy(shifted), 1e-12 * g.energy(th));
}

TEST(Rotation, UtilityDominatesZeroRotationAndFewerRestarts)
{
    for (std::uint64_t s = 0; s < 30; ++s) {
        const int order = s % 2 ? 16 : 4;
        const auto alloc = allocate_theorem1(1.0, 3, order);
        const auto blocks = random_blocks(3, 100, order, 500 + s);
        const auto ptrs = block_ptrs(blocks);
        const CarrierGram g(ptrs, alloc.half_dist, 1e-6);
        RotationOptions opt;
        opt.restarts = 1;
        const double one = carrier_utility(g, opt, s).utility;
        opt.restarts = 5;
        const double five = carrier_utility(g, opt, s).utility;
        EXPECT_GE(five, one);
        const std::vector<double> zero(3, 0.0);
        EXPECT_GE(five, g.energy(zero));
    }
}

TEST(Rotation, DeterministicPerSeed)
{
    const auto blocks = random_blocks(3, 100, 4, 15);
    const auto ptrs = block_ptrs(blocks);
    const auto alloc = allocate_theorem1(1.0, 3, 4);
    RotationOptions opt;
    const auto a = carrier_utility(ptrs, alloc, opt, 99);
    const auto b = carrier_utility(ptrs, alloc, opt, 99);
    EXPECT_EQ(a.thetas, b.thetas);
    EXPECT_EQ(a.utility, b.utility);
}

TEST(Rotation, SweepCapRaisesNonConvergence)
{
    const auto blocks = random_blocks(3, 100, 4, 16);
    const auto ptrs = block_ptrs(blocks);
    const auto alloc = allocate_theorem1(1.0, 3, 4);
    RotationOptions opt;
    opt.max_sweeps = 1;
    EXPECT_THROW(optimize_angles(ptrs, alloc, opt, 1), NonConvergenceError);
    opt.lambda = 0.0;
    EXPECT_THROW(optimize_angles(ptrs, alloc, opt, 1), InvalidConfigError);
    opt.lambda = 1e-3;
    opt.restarts = 0;
    EXPECT_THROW(carrier_utility(ptrs, alloc, opt, 1), InvalidConfigError);
}
