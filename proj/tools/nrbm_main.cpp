// nrbm: experiment runner for reinforced random walks, noise reinforced
// Brownian motion and the Yule martingale embedding.
//
// Either run a config file (--config) or a verification preset (--preset).
// Seed precedence: --seed flag, then the RW_SEED environment variable, then
// the config file's seed key, then 0.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "nrbm/experiments.hpp"

int main(int argc, char** argv) {
    CLI::App app{"reinforced random walk / noise reinforced Brownian motion toolkit"};
    app.get_formatter()->column_width(34);

    std::string config_path;
    std::string preset;
    std::string out_dir = ".";
    unsigned threads = 0;
    std::uint64_t seed_flag = 0;

    app.add_option("--config", config_path, "experiment config file (flat key=value with [sections])");
    app.add_option("--preset", preset, "verification preset to run (see --list-presets)");
    auto* seed_opt = app.add_option("--seed", seed_flag, "master seed (overrides RW_SEED and the config)");
    app.add_option("--threads", threads, "worker threads; 0 = all cores")->default_val(0);
    app.add_option("--out", out_dir, "output directory for CSV data and summary.json")->default_val(".");
    bool list_presets = false;
    app.add_flag("--list-presets", list_presets, "list verification presets and exit");

    // exit-code contract: 0 pass, 1 statistical failure, 2 usage error
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "nrbm: " << e.what() << '\n';
        return nrbm::kExitUsage;
    }

    if (list_presets) {
        for (const auto& p : nrbm::verify_presets())
            std::cout << p.name << "  -  " << p.title << '\n';
        std::cout << "all  -  every preset above\n";
        return nrbm::kExitPass;
    }

    if (config_path.empty() && preset.empty()) {
        std::cerr << "nrbm: provide --config FILE or --preset NAME (see --help)\n";
        return nrbm::kExitUsage;
    }
    if (!config_path.empty() && !preset.empty()) {
        std::cerr << "nrbm: --config and --preset are mutually exclusive\n";
        return nrbm::kExitUsage;
    }

    nrbm::ExperimentOptions opts;
    opts.threads = threads;
    opts.out_dir = out_dir;
    if (const char* env = std::getenv("RW_SEED")) {
        try {
            opts.seed_override = std::stoull(env);
        } catch (const std::exception&) {
            std::cerr << "nrbm: RW_SEED is not an unsigned integer: " << env << '\n';
            return nrbm::kExitUsage;
        }
    }
    if (seed_opt->count() > 0) opts.seed_override = seed_flag;

    try {
        nrbm::Config cfg;
        if (!preset.empty())
            cfg = nrbm::Config::parse_string("experiment = verify\npreset = " + preset + "\n");
        else
            cfg = nrbm::Config::parse_file(config_path);
        return nrbm::run_experiment(cfg, opts);
    } catch (const std::exception& e) {
        std::cerr << "nrbm: " << e.what() << '\n';
        return nrbm::kExitUsage;
    }
}
