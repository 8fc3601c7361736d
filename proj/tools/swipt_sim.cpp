// Command-line driver: single runs, scheme comparisons and parameter sweeps.

#include <swipt/swipt.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace swipt;

namespace {

struct Common {
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out_dir = ".";
    std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, Common& c)
{
    cmd->add_option("--config", c.config_path, "flat key = value config file");
    cmd->add_option("--seed", c.seed, "RNG seed (overrides the config)")->each([&](const std::string&) { c.seed_set = true; });
    cmd->add_option("--out", c.out_dir, "output directory");
    cmd->add_option("--set", c.overrides, "extra key=value overrides, applied after the config file");
}

ScenarioConfig build_config(const Common& c)
{
    ScenarioConfig cfg;
    if (!c.config_path.empty()) cfg = load_config(c.config_path);
    for (const auto& kv : c.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw InvalidConfigError("--set expects key=value, got '" + kv + "'");
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (c.seed_set) cfg.seed = c.seed;
    cfg.validate();
    return cfg;
}

void write_file(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    std::cout << "wrote " << path.string() << '\n';
}

void print_summary(const RunReport& r)
{
    for (const auto& s : r.schemes) {
        std::cout << to_string(s.scheme) << ": harvested " << format_real(s.energy.harvested) << " J (+/- "
                  << format_real(s.harvested_ci95) << "), SER";
        for (double p : s.ser.ser()) std::cout << ' ' << format_real(p);
        std::cout << '\n';
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"SWIPT-NOMA link-level simulator"};
    app.require_subcommand(1);

    Common run_opts;
    auto* run = app.add_subcommand("run", "simulate one scenario");
    add_common(run, run_opts);

    Common cmp_opts;
    std::string cmp_schemes = "conventional,interleave-only,rotate-only,joint";
    auto* compare = app.add_subcommand("compare", "run several schemes on the same data");
    add_common(compare, cmp_opts);
    compare->add_option("--schemes", cmp_schemes, "comma-separated scheme list");

    Common sweep_opts;
    std::string sweep_param;
    std::string sweep_values;
    std::string sweep_schemes;
    auto* sweep = app.add_subcommand("sweep", "repeat a comparison over values of one config key");
    add_common(sweep, sweep_opts);
    sweep->add_option("--param", sweep_param, "config key to vary")->required();
    sweep->add_option("--values", sweep_values, "comma-separated values")->required();
    sweep->add_option("--schemes", sweep_schemes, "comma-separated scheme list (default: conventional and the configured scheme)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            const auto cfg = build_config(run_opts);
            fs::create_directories(run_opts.out_dir);
            const auto report = run_scenario(cfg);
            print_summary(report);
            write_file(fs::path(run_opts.out_dir) / "report.json", report_json(report));
        } else if (*compare) {
            const auto cfg = build_config(cmp_opts);
            fs::create_directories(cmp_opts.out_dir);
            const auto report = run_scenario(cfg, parse_schemes(cmp_schemes));
            print_summary(report);
            write_file(fs::path(cmp_opts.out_dir) / "compare.json", report_json(report));
            write_file(fs::path(cmp_opts.out_dir) / "compare.csv",
                       sweep_csv_header("seed") + sweep_csv_rows(std::to_string(cfg.seed), report));
        } else if (*sweep) {
            const auto base = build_config(sweep_opts);
            std::vector<Scheme> schemes;
            if (sweep_schemes.empty()) {
                schemes.push_back(Scheme::conventional);
                if (base.scheme != Scheme::conventional) schemes.push_back(base.scheme);
            } else {
                schemes = parse_schemes(sweep_schemes);
            }
            fs::create_directories(sweep_opts.out_dir);
            std::string csv = sweep_csv_header(sweep_param);
            Json all = Json::array();
            for (const auto& value : split_list(sweep_values)) {
                auto cfg = base;
                cfg.set(sweep_param, value);
                cfg.validate();
                std::cout << sweep_param << " = " << value << '\n';
                const auto report = run_scenario(cfg, schemes);
                print_summary(report);
                csv += sweep_csv_rows(value, report);
                all.push_back(to_json(report));
            }
            write_file(fs::path(sweep_opts.out_dir) / ("sweep_" + sweep_param + ".csv"), csv);
            write_file(fs::path(sweep_opts.out_dir) / ("sweep_" + sweep_param + ".json"), dump_json(all));
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
