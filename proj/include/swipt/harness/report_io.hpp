#pragma once

#include <swipt/harness/scenario.hpp>

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace swipt {

using Json = nlohmann::ordered_json;

/// %.17g; non-finite values become the strings "inf", "-inf", "nan".
inline std::string format_real(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

inline Json real(double v)
{
    if (!std::isfinite(v)) return format_real(v);
    return v;
}

inline Json reals(const std::vector<double>& v)
{
    Json a = Json::array();
    for (double x : v) a.push_back(real(x));
    return a;
}

inline void write_json(std::ostream& os, const Json& j, int indent)
{
    const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
    const std::string close(static_cast<std::size_t>(indent), ' ');
    switch (j.type()) {
    case Json::value_t::object: {
        if (j.empty()) { os << "{}"; return; }
        os << "{\n";
        bool first = true;
        for (const auto& [key, value] : j.items()) {
            if (!first) os << ",\n";
            first = false;
            os << pad << Json(key).dump() << ": ";
            write_json(os, value, indent + 2);
        }
        os << '\n' << close << '}';
        return;
    }
    case Json::value_t::array: {
        if (j.empty()) { os << "[]"; return; }
        // Numeric arrays stay on one line.
        bool flat = true;
        for (const auto& v : j) flat = flat && v.is_primitive();
        os << '[';
        bool first = true;
        for (const auto& v : j) {
            if (!first) os << (flat ? ", " : ",");
            first = false;
            if (!flat) os << '\n' << pad;
            write_json(os, v, indent + 2);
        }
        if (!flat) os << '\n' << close;
        os << ']';
        return;
    }
    case Json::value_t::number_float:
        os << format_real(j.get<double>());
        return;
    default:
        os << j.dump();
    }
}

} // namespace detail

inline std::string dump_json(const Json& j)
{
    std::ostringstream os;
    detail::write_json(os, j, 0);
    os << '\n';
    return os.str();
}

inline Json to_json(const ScenarioConfig& cfg)
{
    Json j = Json::object();
    for (const auto& [k, v] : cfg.entries()) j[k] = v;
    return j;
}

inline Json to_json(const SchemeReport& r)
{
    Json j;
    j["scheme"] = to_string(r.scheme);
    j["energy"] = {
        {"harvested_J", detail::real(r.energy.harvested)},
        {"harvested_J_ci95", detail::real(r.harvested_ci95)},
        {"received_J", detail::real(r.energy.received)},
        {"radiated_J", detail::real(r.energy.radiated)},
        {"activation_fraction", detail::real(r.energy.activation_fraction)},
        {"slots", r.energy.slots},
        {"active_slots", r.energy.active_slots},
    };
    j["ser"] = detail::reals(r.ser.ser());
    j["symbol_errors"] = r.ser.errors;
    j["symbols_per_user"] = r.ser.symbols;
    j["distortion"] = {{"checks", r.distortion_checks}, {"violations", r.distortion_violations}};
    j["search"] = {{"oracle_calls", r.oracle_calls}};
    j["convergence"] = {
        {"angle_solves", r.angle_solves},
        {"mean_sweeps", detail::real(r.mean_sweeps)},
        {"max_sweeps", r.max_sweeps},
        {"trace", detail::reals(r.convergence_trace)},
    };
    return j;
}

inline Json to_json(const RunReport& r)
{
    Json j;
    j["config"] = to_json(r.config);
    j["seed"] = r.config.seed;
    j["frames"] = r.frames;
    j["wpt_users"] = r.config.K_E;
    j["overhead_bits"] = {
        {"interleaver_per_frame", r.overhead.interleaver_bits},
        {"rotation_per_frame", r.overhead.rotation_bits},
        {"total_per_frame", r.overhead.total()},
        {"total", r.overhead.total() * r.frames},
    };
    j["allocation"] = {
        {"rule", to_string(r.config.allocation)},
        {"power_W", detail::reals(r.allocation.per_user)},
        {"half_distance", detail::reals(r.allocation.half_dist)},
    };
    j["spectrum_efficiency"] = {
        {"selected", detail::real(r.kappa())},
        {"interferer_gain", detail::real(r.kappa_interferer)},
        {"receiver_gain", detail::real(r.kappa_receiver)},
        {"ofdma", detail::real(r.kappa_ofdma)},
    };
    Json schemes = Json::array();
    for (const auto& s : r.schemes) schemes.push_back(to_json(s));
    j["schemes"] = std::move(schemes);
    return j;
}

inline std::string report_json(const RunReport& r) { return dump_json(to_json(r)); }

/// CSV header for sweep rows; `param` names the first column.
inline std::string sweep_csv_header(const std::string& param)
{
    return param + ",scheme,energy_J,energy_J_ci95,received_J,activation_fraction,gain_vs_conventional,ser\n";
}

/// One row per scheme of `r`; `ser` lists per-user values separated by ';'.
inline std::string sweep_csv_rows(const std::string& value, const RunReport& r)
{
    const SchemeReport* base = nullptr;
    for (const auto& s : r.schemes)
        if (s.scheme == Scheme::conventional) base = &s;
    std::string out;
    for (const auto& s : r.schemes) {
        std::string ser;
        for (double p : s.ser.ser()) ser += (ser.empty() ? "" : ";") + format_real(p);
        const double gain =
            base && base->energy.harvested > 0 ? s.energy.harvested / base->energy.harvested - 1.0 : std::nan("");
        out += value + ',' + to_string(s.scheme) + ',' + format_real(s.energy.harvested) + ',' +
               format_real(s.harvested_ci95) + ',' + format_real(s.energy.received) + ',' +
               format_real(s.energy.activation_fraction) + ',' + format_real(gain) + ',' + ser + '\n';
    }
    return out;
}

} // namespace swipt
