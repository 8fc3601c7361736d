#pragma once

#include <swipt/common.hpp>
#include <swipt/energy.hpp>
#include <swipt/power.hpp>

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace swipt {

enum class Scheme { conventional, interleave_only, rotate_only, joint };
enum class SearchMethod { greedy, exhaustive };
enum class AllocationRule { theorem1, equal_sinr };

inline const char* to_string(Scheme s)
{
    switch (s) {
    case Scheme::conventional: return "conventional";
    case Scheme::interleave_only: return "interleave-only";
    case Scheme::rotate_only: return "rotate-only";
    case Scheme::joint: return "joint";
    }
    return "?";
}
inline const char* to_string(SearchMethod s) { return s == SearchMethod::greedy ? "greedy" : "exhaustive"; }
inline const char* to_string(AllocationRule a) { return a == AllocationRule::theorem1 ? "theorem1" : "equal-sinr"; }
inline const char* to_string(SinrConvention c) { return c == SinrConvention::interferer ? "interferer" : "receiver"; }
inline const char* to_string(HarvestGating g) { return g == HarvestGating::per_slot ? "per-slot" : "per-symbol-sum"; }

inline Scheme parse_scheme(const std::string& s)
{
    if (s == "conventional") return Scheme::conventional;
    if (s == "interleave-only") return Scheme::interleave_only;
    if (s == "rotate-only") return Scheme::rotate_only;
    if (s == "joint") return Scheme::joint;
    throw InvalidConfigError("unknown scheme '" + s + "'");
}

inline std::vector<std::string> split_list(const std::string& s, char sep = ',')
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

inline std::vector<Scheme> parse_schemes(const std::string& s)
{
    std::vector<Scheme> out;
    for (const auto& item : split_list(s)) out.push_back(parse_scheme(item));
    if (out.empty()) throw InvalidConfigError("empty scheme list");
    return out;
}

/*
 * Scenario parameters.  Field names match the config-file keys.  Powers are in
 * watts except sigma2 and P_th (dBm); gains are in dB; angles in radians.
 * Defaults reproduce the reference setup: 3 WIT users at -53/-60/-70 dB, one
 * WPT user at -30 dB, 10 carriers of 1 W, sigma2 = -80 dBm, T = 1 us.
 */
struct ScenarioConfig {
    int K_I = 3;
    int K_E = 1;
    int N = 10;
    int L = 100;
    int M = 4;
    double P_n = 1.0;
    double T = 1e-6;
    double sigma2 = -80.0;
    std::vector<double> wit_gains{-53.0, -60.0, -70.0};
    double wpt_gain = -30.0;
    double P_th = -std::numeric_limits<double>::infinity();
    Scheme scheme = Scheme::joint;
    SearchMethod search = SearchMethod::greedy;
    AllocationRule allocation = AllocationRule::theorem1;
    int restarts = 3;
    double lambda = 1e-3;
    int D = 16;
    std::uint64_t seed = 1;
    std::int64_t symbol_budget = 1000000;

    // Extensions.
    int alloc_M = 0;                 ///< QAM order whose A_max sets the theorem-1 split; 0 = M
    HarvestGating harvest_gating = HarvestGating::per_slot;
    SinrConvention sinr_convention = SinrConvention::interferer;
    double bandwidth = 1e6;          ///< B (Hz) per carrier
    bool quantize_angles = false;    ///< transmit the D-level region centres instead of exact angles
    bool simulate_wit = true;        ///< run channels + SIC for SER
    int max_sweeps = 1000;           ///< per angle solve; rare near-degenerate carriers need > 100
    double enum_cap = 1e7;
    int threads = 0;                 ///< 0 = hardware concurrency

    int allocation_order() const { return alloc_M > 0 ? alloc_M : M; }
    std::int64_t frames() const { return symbol_budget / (static_cast<std::int64_t>(N) * L); }

    std::vector<double> wit_gains_linear() const
    {
        std::vector<double> out;
        for (double g : wit_gains) out.push_back(db_to_linear(g));
        return out;
    }

    void validate() const
    {
        if (K_I < 1 || K_E < 0 || N < 1 || L < 1) throw InvalidConfigError("K_I, N, L must be >= 1 and K_E >= 0");
        (void)QamConstellation(M);
        (void)QamConstellation(allocation_order());
        if (!(P_n > 0.0)) throw InvalidConfigError("P_n must be > 0");
        if (!(T > 0.0)) throw InvalidConfigError("T must be > 0");
        if (static_cast<int>(wit_gains.size()) != K_I) throw InvalidConfigError("wit_gains must list K_I gains");
        if (!(wpt_gain <= 0.0)) throw InvalidConfigError("wpt_gain must be <= 0 dB");
        if (restarts < 1) throw InvalidConfigError("restarts must be >= 1");
        if (!(lambda > 0.0)) throw InvalidConfigError("lambda must be > 0");
        if (D < 1) throw InvalidConfigError("D must be >= 1");
        if (symbol_budget < 1 || symbol_budget % (static_cast<std::int64_t>(N) * L) != 0)
            throw InvalidConfigError("symbol_budget must be a positive multiple of N*L");
        if (!(bandwidth > 0.0)) throw InvalidConfigError("bandwidth must be > 0");
        if (max_sweeps < 1) throw InvalidConfigError("max_sweeps must be >= 1");
    }

    /// Applies one `key = value` setting.
    void set(const std::string& key, const std::string& value)
    {
        auto as_int = [&] { return static_cast<int>(std::stol(value)); };
        auto as_double = [&] { return std::stod(value); };
        auto as_bool = [&] {
            if (value == "true" || value == "1" || value == "yes") return true;
            if (value == "false" || value == "0" || value == "no") return false;
            throw InvalidConfigError("bad boolean '" + value + "' for " + key);
        };
        try {
            if (key == "K_I") K_I = as_int();
            else if (key == "K_E") K_E = as_int();
            else if (key == "N") N = as_int();
            else if (key == "L") L = as_int();
            else if (key == "M") M = as_int();
            else if (key == "P_n") P_n = as_double();
            else if (key == "T") T = as_double();
            else if (key == "sigma2") sigma2 = as_double();
            else if (key == "wit_gains") {
                wit_gains.clear();
                for (const auto& g : split_list(value)) wit_gains.push_back(std::stod(g));
            }
            else if (key == "wpt_gain") wpt_gain = as_double();
            else if (key == "P_th") P_th = as_double();
            else if (key == "scheme") scheme = parse_scheme(value);
            else if (key == "search") {
                if (value == "greedy") search = SearchMethod::greedy;
                else if (value == "exhaustive") search = SearchMethod::exhaustive;
                else throw InvalidConfigError("unknown search '" + value + "'");
            }
            else if (key == "allocation") {
                if (value == "theorem1") allocation = AllocationRule::theorem1;
                else if (value == "equal-sinr") allocation = AllocationRule::equal_sinr;
                else throw InvalidConfigError("unknown allocation '" + value + "'");
            }
            else if (key == "restarts") restarts = as_int();
            else if (key == "lambda") lambda = as_double();
            else if (key == "D") D = as_int();
            else if (key == "seed") seed = std::stoull(value);
            else if (key == "symbol_budget") symbol_budget = static_cast<std::int64_t>(std::stod(value));
            else if (key == "alloc_M") alloc_M = as_int();
            else if (key == "harvest_gating") {
                if (value == "per-slot") harvest_gating = HarvestGating::per_slot;
                else if (value == "per-symbol-sum") harvest_gating = HarvestGating::per_symbol_sum;
                else throw InvalidConfigError("unknown harvest_gating '" + value + "'");
            }
            else if (key == "sinr_convention") {
                if (value == "interferer") sinr_convention = SinrConvention::interferer;
                else if (value == "receiver") sinr_convention = SinrConvention::receiver;
                else throw InvalidConfigError("unknown sinr_convention '" + value + "'");
            }
            else if (key == "bandwidth") bandwidth = as_double();
            else if (key == "quantize_angles") quantize_angles = as_bool();
            else if (key == "simulate_wit") simulate_wit = as_bool();
            else if (key == "max_sweeps") max_sweeps = as_int();
            else if (key == "enum_cap") enum_cap = as_double();
            else if (key == "threads") threads = as_int();
            else throw InvalidConfigError("unknown config key '" + key + "'");
        } catch (const std::logic_error&) {
            throw InvalidConfigError("bad value '" + value + "' for " + key);
        }
    }

    /// Every key with its current value, in declaration order.
    std::vector<std::pair<std::string, std::string>> entries() const
    {
        auto num = [](double v) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            return std::string(buf);
        };
        std::string gains;
        for (std::size_t i = 0; i < wit_gains.size(); ++i) gains += (i ? "," : "") + num(wit_gains[i]);
        return {
            {"K_I", std::to_string(K_I)}, {"K_E", std::to_string(K_E)}, {"N", std::to_string(N)},
            {"L", std::to_string(L)}, {"M", std::to_string(M)}, {"P_n", num(P_n)}, {"T", num(T)},
            {"sigma2", num(sigma2)}, {"wit_gains", gains}, {"wpt_gain", num(wpt_gain)}, {"P_th", num(P_th)},
            {"scheme", to_string(scheme)}, {"search", to_string(search)}, {"allocation", to_string(allocation)},
            {"restarts", std::to_string(restarts)}, {"lambda", num(lambda)}, {"D", std::to_string(D)},
            {"seed", std::to_string(seed)}, {"symbol_budget", std::to_string(symbol_budget)},
            {"alloc_M", std::to_string(alloc_M)}, {"harvest_gating", to_string(harvest_gating)},
            {"sinr_convention", to_string(sinr_convention)}, {"bandwidth", num(bandwidth)},
            {"quantize_angles", quantize_angles ? "true" : "false"},
            {"simulate_wit", simulate_wit ? "true" : "false"}, {"max_sweeps", std::to_string(max_sweeps)},
            {"enum_cap", num(enum_cap)}, {"threads", std::to_string(threads)},
        };
    }
};

/// Parses `key = value` lines; `#` starts a comment, blank lines are skipped.
inline ScenarioConfig parse_config(std::istream& in, ScenarioConfig cfg = {})
{
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidConfigError("line " + std::to_string(lineno) + ": expected key = value");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

inline ScenarioConfig load_config(const std::string& path, ScenarioConfig cfg = {})
{
    std::ifstream in(path);
    if (!in) throw InvalidConfigError("cannot open config file " + path);
    return parse_config(in, std::move(cfg));
}

} // namespace swipt
