#pragma once

#include <swipt/common.hpp>
#include <swipt/energy.hpp>
#include <swipt/harness/config.hpp>
#include <swipt/harness/control.hpp>
#include <swipt/harness/spectrum.hpp>
#include <swipt/interleaver.hpp>
#include <swipt/link.hpp>
#include <swipt/modem.hpp>
#include <swipt/power.hpp>
#include <swipt/rotation.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <unordered_map>
#include <vector>

namespace swipt {

struct SchemeReport {
    Scheme scheme = Scheme::conventional;
    EnergyReport energy;             ///< one WPT user, summed over all frames
    double harvested_ci95 = 0.0;     ///< 95% half-width of the harvested total, from frame-to-frame spread
    SerCount ser;
    std::uint64_t distortion_checks = 0;
    std::uint64_t distortion_violations = 0;
    std::uint64_t oracle_calls = 0;
    std::uint64_t angle_solves = 0;
    double mean_sweeps = 0.0;
    int max_sweeps = 0;
    std::vector<double> convergence_trace; ///< objective per sweep, first carrier of the first frame
};

struct RunReport {
    ScenarioConfig config;
    std::int64_t frames = 0;
    ControlOverhead overhead;        ///< per frame
    PowerAllocation allocation;      ///< same on every carrier (frequency-flat gains)
    double kappa_interferer = 0.0;
    double kappa_receiver = 0.0;
    double kappa_ofdma = 0.0;
    std::vector<SchemeReport> schemes;

    double kappa() const
    {
        return config.sinr_convention == SinrConvention::interferer ? kappa_interferer : kappa_receiver;
    }

    const SchemeReport& scheme(Scheme s) const
    {
        for (const auto& r : schemes)
            if (r.scheme == s) return r;
        throw InvalidConfigError(std::string("scheme not in report: ") + to_string(s));
    }
};

namespace detail {

inline constexpr std::uint64_t data_tag = 0x64617461;   // "data"
inline constexpr std::uint64_t noise_tag = 0x6e6f6973;  // "nois"
inline constexpr std::uint64_t angle_tag = 0x616e676c;  // "angl"
inline constexpr std::size_t data_chunk = 4096;

/*
 * Symbol indices [start, start + count) of user k's stream.  The stream is cut
 * into fixed chunks with their own generators, so a symbol's value depends
 * only on its position and not on how frames are sized.
 */
inline std::vector<std::uint16_t> user_symbols(std::uint64_t seed, int user, std::uint64_t start,
                                               std::size_t count, int order)
{
    std::vector<std::uint16_t> out;
    out.reserve(count);
    std::uniform_int_distribution<int> pick(0, order - 1);
    std::uint64_t pos = start;
    const std::uint64_t end = start + count;
    while (pos < end) {
        const std::uint64_t chunk = pos / data_chunk;
        Rng rng = make_stream(seed, data_tag, static_cast<std::uint64_t>(user), chunk);
        const std::uint64_t chunk_begin = chunk * data_chunk;
        for (std::uint64_t i = chunk_begin; i < chunk_begin + data_chunk && i < end; ++i) {
            const auto v = static_cast<std::uint16_t>(pick(rng));
            if (i >= pos) out.push_back(v);
        }
        pos = std::min(end, chunk_begin + data_chunk);
    }
    return out;
}

inline std::uint64_t frame_seed(std::uint64_t seed, std::int64_t frame)
{
    Rng rng = make_stream(seed, angle_tag, static_cast<std::uint64_t>(frame));
    return rng();
}

struct FrameResult {
    EnergyReport energy;
    std::vector<std::uint64_t> errors;
    std::uint64_t symbols = 0;
    std::uint64_t checks = 0;
    std::uint64_t violations = 0;
    std::uint64_t oracle_calls = 0;
    std::uint64_t angle_solves = 0;
    std::uint64_t sweep_total = 0;
    int max_sweeps = 0;
    std::vector<double> trace;
};

struct SchemeChoice {
    InterleavingTensor tensor;
    RotationMatrix thetas;
};

/// Runs `body(i)` for i in [0, count) on `threads` workers; rethrows the first failure.
template <class Body>
void parallel_for(std::int64_t count, int threads, Body&& body)
{
    if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    threads = static_cast<int>(std::min<std::int64_t>(threads, count));
    if (threads <= 1) {
        for (std::int64_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            while (!failed) {
                const std::int64_t i = next++;
                if (i >= count) break;
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                    failed = true;
                }
            }
        });
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

} // namespace detail

inline PowerAllocation scenario_allocation(const ScenarioConfig& cfg)
{
    if (cfg.allocation == AllocationRule::theorem1)
        return allocate_theorem1(cfg.P_n, cfg.K_I, cfg.M, cfg.allocation_order());
    const auto gains = cfg.wit_gains_linear();
    return allocate_equal_sinr(cfg.P_n, gains, dbm_to_watt(cfg.sigma2), cfg.M, cfg.sinr_convention);
}

/// Original-ordered frame `f` of the scenario's symbol streams.
inline Frame scenario_frame(const ScenarioConfig& cfg, std::int64_t f)
{
    const QamConstellation qam(cfg.M);
    const std::size_t len = static_cast<std::size_t>(cfg.L);
    const std::size_t per_frame = static_cast<std::size_t>(cfg.N) * len;
    Frame frame(cfg.K_I, cfg.N, len);
    for (int k = 0; k < cfg.K_I; ++k) {
        const auto idx = detail::user_symbols(cfg.seed, k, static_cast<std::uint64_t>(f) * per_frame, per_frame, cfg.M);
        for (int m = 0; m < cfg.N; ++m)
            frame.at(k, m) = modulate_block(std::span<const std::uint16_t>(idx.data() + m * len, len), qam, k, m);
    }
    return frame;
}

/*
 * Per-frame pipeline: symbols -> interleaving / rotation chosen by the scheme
 * -> superposition -> harvester accounting at the WPT user, plus per WIT user
 * AWGN, rotation-aware SIC and de-interleaving for the error count.
 */
inline RunReport run_scenario(const ScenarioConfig& cfg, const std::vector<Scheme>& schemes)
{
    cfg.validate();
    if (schemes.empty()) throw InvalidConfigError("no schemes to run");
    if (cfg.search == SearchMethod::exhaustive) {
        double fact = 1.0;
        for (int i = 2; i <= cfg.N; ++i) fact *= i;
        for (Scheme s : schemes)
            if ((s == Scheme::joint || s == Scheme::interleave_only) &&
                detail::pow_count(fact, cfg.K_I) > cfg.enum_cap)
                throw InvalidConfigError("exhaustive search beyond the enumeration cap; use search = greedy");
    }

    RunReport report;
    report.config = cfg;
    report.frames = cfg.frames();
    report.overhead = control_overhead(cfg.K_I, cfg.N, cfg.D);
    report.allocation = scenario_allocation(cfg);
    const auto& alloc = report.allocation;
    {
        const auto gains = cfg.wit_gains_linear();
        const double s2 = dbm_to_watt(cfg.sigma2);
        const std::vector<PowerAllocation> per_carrier(cfg.N, alloc);
        const std::vector<double> carrier_power(cfg.N, cfg.P_n);
        report.kappa_interferer = spectrum_efficiency(per_carrier, gains, s2, cfg.bandwidth, SinrConvention::interferer);
        report.kappa_receiver = spectrum_efficiency(per_carrier, gains, s2, cfg.bandwidth, SinrConvention::receiver);
        report.kappa_ofdma = ofdma_spectrum_efficiency(carrier_power, gains, s2, cfg.bandwidth);
    }

    RotationOptions opt;
    opt.lambda = cfg.lambda;
    opt.max_sweeps = cfg.max_sweeps;
    opt.restarts = cfg.restarts;
    opt.symbol_period = cfg.T;

    HarvesterModel harvester;
    harvester.sensitivity_w = dbm_to_watt(cfg.P_th);
    harvester.gain = db_to_linear(cfg.wpt_gain);
    harvester.symbol_period = cfg.T;
    harvester.gating = cfg.harvest_gating;

    const std::span<const double> scales(alloc.half_dist);
    const double sigma2_w = dbm_to_watt(cfg.sigma2);
    const int users = cfg.K_I;
    const int carriers = cfg.N;

    std::vector<std::vector<detail::FrameResult>> results(schemes.size(),
                                                          std::vector<detail::FrameResult>(report.frames));

    detail::parallel_for(report.frames, cfg.threads, [&](std::int64_t f) {
        const Frame original = scenario_frame(cfg, f);
        const std::uint64_t angle_seed = detail::frame_seed(cfg.seed, f);

        // eta_n is a pure function of the block combination; memoise it across
        // schemes and greedy steps.  Key = original block indices.
        std::unordered_map<std::uint64_t, AngleSolution> rotated;
        auto combo_key = [&](BlockSpan col) {
            std::uint64_t key = 0;
            for (int k = users - 1; k >= 0; --k) key = key * carriers + col[k]->original_index;
            return key;
        };
        auto solve = [&](BlockSpan col) -> const AngleSolution& {
            const auto key = combo_key(col);
            auto it = rotated.find(key);
            if (it == rotated.end())
                it = rotated.emplace(key, carrier_utility(CarrierGram(col, scales, cfg.T), opt, angle_seed)).first;
            return it->second;
        };
        const std::vector<double> zeros(users, 0.0);
        const CarrierUtility plain = [&](BlockSpan col) { return CarrierGram(col, scales, cfg.T).energy(zeros); };
        const CarrierUtility with_rotation = [&](BlockSpan col) { return solve(col).utility; };
        auto search = [&](const CarrierUtility& u) {
            return cfg.search == SearchMethod::greedy ? greedy_search(original, u, cfg.enum_cap)
                                                      : exhaustive_search(original, u, cfg.enum_cap);
        };

        for (std::size_t si = 0; si < schemes.size(); ++si) {
            const Scheme scheme = schemes[si];
            auto& out = results[si][f];
            detail::SchemeChoice choice{identity_tensor(users, carriers), RotationMatrix(carriers, users)};

            if (scheme == Scheme::interleave_only || scheme == Scheme::joint) {
                auto found = search(scheme == Scheme::joint ? with_rotation : plain);
                choice.tensor = std::move(found.tensor);
                out.oracle_calls = found.oracle_calls;
            }
            const Frame on_air = apply_interleaving(choice.tensor, original);

            if (scheme == Scheme::rotate_only || scheme == Scheme::joint) {
                for (int n = 0; n < carriers; ++n) {
                    const auto col = on_air.column(n);
                    // on_air holds copies; look the combination up by original index.
                    const AngleSolution& sol = solve(col);
                    for (int k = 0; k < users; ++k) choice.thetas.at(n, k) = sol.thetas[k];
                    ++out.angle_solves;
                    out.sweep_total += static_cast<std::uint64_t>(sol.sweeps);
                    out.max_sweeps = std::max(out.max_sweeps, sol.sweeps);
                    if (n == 0) out.trace = sol.sweep_trace;
                }
                if (cfg.quantize_angles) {
                    choice.thetas.quant_levels = cfg.D;
                    for (int n = 0; n < carriers; ++n) {
                        const double ref = choice.thetas.at(n, 0);
                        for (int k = 0; k < users; ++k)
                            choice.thetas.at(n, k) =
                                k == 0 ? 0.0 : quantize_angle(choice.thetas.at(n, k) - ref, cfg.D).representative;
                    }
                }
            }

            SuperGrid grid(carriers);
            for (int n = 0; n < carriers; ++n) {
                const auto col = on_air.column(n);
                grid[n] = superimpose(col, scales, choice.thetas.carrier(n));
                for (const auto& s : grid[n])
                    for (int k = 1; k < users; ++k) {
                        const auto [xi_i, xi_q] = distortion(std::span<const SuperTerm>(s.terms.data(), k),
                                                             choice.thetas.at(n, k));
                        const double d = alloc.half_dist[k] * (1.0 + 1e-9);
                        ++out.checks;
                        if (std::abs(xi_i) > d || std::abs(xi_q) > d) ++out.violations;
                    }
            }
            out.energy = harvested_energy(grid, harvester);

            out.errors.assign(users, 0);
            if (!cfg.simulate_wit) continue;
            SicConfig sic;
            sic.order = cfg.M;
            sic.alloc = alloc;
            sic.thetas = &choice.thetas;
            for (int k = 0; k < users; ++k) {
                AwgnChannel ch;
                ch.gain_db = cfg.wit_gains[k];
                ch.noise_power = sigma2_w;
                ch.rng = make_stream(cfg.seed, detail::noise_tag, static_cast<std::uint64_t>(f),
                                     static_cast<std::uint64_t>(k));
                sic.channel_amplitude = ch.amplitude_gain();
                std::vector<std::vector<cplx>> received(carriers);
                for (int n = 0; n < carriers; ++n) {
                    std::vector<cplx> clean(grid[n].size());
                    for (std::size_t l = 0; l < clean.size(); ++l) clean[l] = grid[n][l].value;
                    received[n] = apply_awgn(clean, ch);
                }
                const auto detected = deinterleave_user(choice.tensor, k, sic_receive(received, sic, k));
                for (int m = 0; m < carriers; ++m) {
                    const auto& sent = original.at(k, m).indices;
                    const auto& got = detected[m].indices;
                    for (std::size_t l = 0; l < sent.size(); ++l) out.errors[k] += sent[l] != got[l];
                }
            }
            out.symbols = static_cast<std::uint64_t>(carriers) * cfg.L;
        }
    });

    // Ordered reduction over frames.
    for (std::size_t si = 0; si < schemes.size(); ++si) {
        SchemeReport r;
        r.scheme = schemes[si];
        r.ser.errors.assign(users, 0);
        r.ser.symbols.assign(users, 0);
        double sum = 0.0;
        double sum_sq = 0.0;
        std::uint64_t sweep_total = 0;
        for (std::int64_t f = 0; f < report.frames; ++f) {
            const auto& fr = results[si][f];
            r.energy += fr.energy;
            sum += fr.energy.harvested;
            sum_sq += fr.energy.harvested * fr.energy.harvested;
            for (int k = 0; k < users; ++k) {
                r.ser.errors[k] += fr.errors[k];
                r.ser.symbols[k] += fr.symbols;
            }
            r.distortion_checks += fr.checks;
            r.distortion_violations += fr.violations;
            r.oracle_calls += fr.oracle_calls;
            r.angle_solves += fr.angle_solves;
            sweep_total += fr.sweep_total;
            r.max_sweeps = std::max(r.max_sweeps, fr.max_sweeps);
            if (f == 0) r.convergence_trace = fr.trace;
        }
        const double frames = static_cast<double>(report.frames);
        if (report.frames > 1) {
            const double mean = sum / frames;
            const double var = std::max(0.0, (sum_sq - frames * mean * mean) / (frames - 1.0));
            r.harvested_ci95 = 1.96 * std::sqrt(var * frames);
        }
        r.mean_sweeps = r.angle_solves ? static_cast<double>(sweep_total) / static_cast<double>(r.angle_solves) : 0.0;
        report.schemes.push_back(std::move(r));
    }
    return report;
}

inline RunReport run_scenario(const ScenarioConfig& cfg)
{
    return run_scenario(cfg, {cfg.scheme});
}

} // namespace swipt
