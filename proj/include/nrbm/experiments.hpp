#pragma once

// Experiment runner: reads a flat config, validates every parameter before
// simulating, writes CSV data plus a summary.json of StatReports.
//
// Exit codes (also the CLI contract): 0 all verdicts pass, 1 a statistical
// verdict failed, 2 usage or config error.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "nrbm/config.hpp"
#include "nrbm/csv.hpp"
#include "nrbm/ensemble.hpp"
#include "nrbm/nrbm.hpp"
#include "nrbm/report_json.hpp"
#include "nrbm/verify.hpp"
#include "nrbm/walk.hpp"
#include "nrbm/yule.hpp"

namespace nrbm {

struct ExperimentOptions {
    std::optional<std::uint64_t> seed_override; // --seed flag or RW_SEED env
    unsigned threads = 0;
    std::string out_dir = ".";
};

inline constexpr int kExitPass = 0;
inline constexpr int kExitStatFailure = 1;
inline constexpr int kExitUsage = 2;

namespace detail {

inline StepLaw law_from_config(const Config& cfg, const std::string& section = "law") {
    const std::string kind = cfg.get_string(section + ".kind", "rademacher");
    if (kind == "rademacher") return StepLaw::rademacher();
    if (kind == "gaussian")
        return StepLaw::gaussian(cfg.get_double(section + ".mu"), cfg.get_double(section + ".sigma"));
    if (kind == "uniform")
        return StepLaw::uniform(cfg.get_double(section + ".a"), cfg.get_double(section + ".b"));
    if (kind == "discrete")
        return StepLaw::discrete(cfg.get_double_list(section + ".values"),
                                 cfg.get_double_list(section + ".probs"));
    throw std::runtime_error("config: unknown law kind '" + kind + "'");
}

inline Grid grid_from_config(const Config& cfg) {
    const std::string kind = cfg.get_string("grid.kind", "uniform");
    if (kind == "uniform")
        return Grid::uniform(cfg.get_double("grid.a"), cfg.get_double("grid.b"),
                             static_cast<std::size_t>(cfg.get_u64("grid.count")));
    if (kind == "log")
        return Grid::log_spaced(cfg.get_double("grid.a"), cfg.get_double("grid.b"),
                                static_cast<std::size_t>(cfg.get_u64("grid.count")));
    if (kind == "list") return Grid(cfg.get_double_list("grid.times"));
    throw std::runtime_error("config: unknown grid kind '" + kind + "'");
}

inline void reject_unknown_keys(const Config& cfg) {
    const auto unknown = cfg.unknown_keys();
    if (!unknown.empty()) {
        std::string msg = "config: unknown key(s):";
        for (const auto& k : unknown) msg += " " + k;
        throw std::runtime_error(msg);
    }
}

inline void print_report_table(const std::vector<StatReport>& reports, std::ostream& os) {
    for (const auto& r : reports) {
        const char* verdict = r.pass ? "PASS" : (r.warn_only ? "WARN" : "FAIL");
        os << "  [" << verdict << "] " << r.name << ": estimate " << r.estimate;
        if (r.p_value)
            os << ", p-value " << *r.p_value << " (threshold " << r.target << ")";
        else
            os << ", target " << r.target << " +/- " << r.tolerance;
        os << '\n';
    }
}

} // namespace detail

inline int run_walk_ensemble_experiment(const Config& cfg, const ExperimentOptions& opts,
                                        std::uint64_t seed) {
    const double p = cfg.get_double("p");
    const auto n = static_cast<std::size_t>(cfg.get_u64("n"));
    const auto replicas = static_cast<std::size_t>(cfg.get_u64("replicas"));
    const StepLaw law = detail::law_from_config(cfg);
    std::vector<std::uint64_t> checkpoints =
        cfg.has("checkpoints") ? cfg.get_u64_list("checkpoints") : std::vector<std::uint64_t>{n};
    detail::reject_unknown_keys(cfg);
    if (replicas == 0) throw std::runtime_error("config: replicas must be >= 1");

    const auto ens = run_walk_ensemble(p, n, law, checkpoints, replicas, seed, opts.threads);

    CsvWriter csv(opts.out_dir + "/walk_ensemble.csv", {"replica", "checkpoint_n", "S_hat", "max_abs_S"});
    for (std::size_t r = 0; r < replicas; ++r)
        for (std::size_t c = 0; c < ens.checkpoints.size(); ++c)
            csv.row() << r << ens.checkpoints[c] << ens.s[c][r] << ens.max_abs[c][r];
    csv.close();

    nlohmann::json meta;
    meta["experiment"] = "walk-ensemble";
    meta["seed"] = seed;
    write_summary(opts.out_dir + "/summary.json", {}, meta);
    return kExitPass;
}

inline int run_nrbm_paths_experiment(const Config& cfg, const ExperimentOptions& opts,
                                     std::uint64_t seed) {
    const ReinforcementP p(cfg.get_double("p"));
    const Grid grid = detail::grid_from_config(cfg);
    const auto replicas = static_cast<std::size_t>(cfg.get_u64("replicas"));
    const std::string sampler = cfg.get_string("sampler", "exact");
    const double t0 = cfg.get_double("t0", 1e-4);
    const auto substeps = static_cast<std::size_t>(cfg.get_u64("substeps", 10'000));
    detail::reject_unknown_keys(cfg);
    if (replicas == 0) throw std::runtime_error("config: replicas must be >= 1");
    if (sampler != "exact" && sampler != "cholesky" && sampler != "euler")
        throw std::runtime_error("config: sampler must be one of exact, cholesky, euler");

    auto paths = run_replicas<std::vector<double>>(
        replicas, seed, opts.threads, [&](std::size_t, RngStream& rng) {
            if (sampler == "exact") return sample_exact(p, grid, rng).values;
            if (sampler == "cholesky") return sample_cholesky(p, grid, rng).values;
            return sample_euler(p, grid, rng, t0, substeps).values;
        });

    CsvWriter csv(opts.out_dir + "/nrbm_paths.csv", {"replica", "t", "value"});
    for (std::size_t r = 0; r < replicas; ++r)
        for (std::size_t i = 0; i < grid.size(); ++i)
            csv.row() << r << grid.times()[i] << paths[r][i];
    csv.close();

    nlohmann::json meta;
    meta["experiment"] = "nrbm-paths";
    meta["seed"] = seed;
    meta["sampler"] = sampler;
    write_summary(opts.out_dir + "/summary.json", {}, meta);
    return kExitPass;
}

inline int run_yule_martingale_experiment(const Config& cfg, const ExperimentOptions& opts,
                                          std::uint64_t seed) {
    const double p = cfg.get_double("p");
    const double horizon = cfg.get_double("horizon");
    const auto replicas = static_cast<std::size_t>(cfg.get_u64("replicas"));
    const StepLaw law = detail::law_from_config(cfg);
    detail::reject_unknown_keys(cfg);
    if (replicas == 0) throw std::runtime_error("config: replicas must be >= 1");
    if (!(p > 0.0 && p < 0.5)) throw std::runtime_error("config: yule-martingale requires p in (0,1/2)");
    if (std::abs(law.mean()) > 1e-12)
        throw std::runtime_error("config: yule-martingale requires a centered law (mean 0); got mean " +
                                 std::to_string(law.mean()));

    auto paths = run_replicas<MartingalePath>(replicas, seed, opts.threads,
                                              [&](std::size_t, RngStream& rng) {
                                                  return embed_martingale(p, law, horizon, rng);
                                              });

    CsvWriter csv(opts.out_dir + "/yule_martingale.csv",
                  {"replica", "t", "M", "sq_bracket", "angle_bracket", "Y", "tau_hat"});
    for (std::size_t r = 0; r < replicas; ++r) {
        const auto& mp = paths[r];
        for (std::size_t k = 0; k < mp.rows(); ++k)
            csv.row() << r << mp.times[k] << mp.martingale[k] << mp.square_bracket[k]
                      << mp.angle_bracket[k] << mp.population_after_row(k) << mp.tau_hat;
    }
    csv.close();

    nlohmann::json meta;
    meta["experiment"] = "yule-martingale";
    meta["seed"] = seed;
    write_summary(opts.out_dir + "/summary.json", {}, meta);
    return kExitPass;
}

inline int run_verify_experiment(const Config& cfg, const ExperimentOptions& opts, std::uint64_t seed,
                                 std::ostream& os = std::cout) {
    const std::string preset = cfg.get_string("preset", "all");
    VerifyOptions vopts;
    vopts.seed = seed;
    vopts.threads = opts.threads;
    vopts.replicas = static_cast<std::size_t>(cfg.get_u64("replicas", 0));
    detail::reject_unknown_keys(cfg);

    std::vector<StatReport> reports;
    try {
        reports = run_preset(preset, vopts);
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(e.what()); // usage error: unknown preset / too few replicas
    }

    os << "verify preset '" << preset << "' (seed " << seed << "):\n";
    detail::print_report_table(reports, os);
    std::size_t hard_failures = 0;
    for (const auto& r : reports)
        if (!r.pass && !r.warn_only) ++hard_failures;
    os << (hard_failures == 0 ? "all checks passed" : std::to_string(hard_failures) + " check(s) failed")
       << '\n';

    nlohmann::json meta;
    meta["experiment"] = "verify";
    meta["preset"] = preset;
    meta["seed"] = seed;
    write_summary(opts.out_dir + "/summary.json", reports, meta);
    return hard_failures == 0 ? kExitPass : kExitStatFailure;
}

/// Dispatch a parsed config.  Throws for usage errors (the CLI maps those to
/// exit code 2); returns 0 or 1 otherwise.
inline int run_experiment(const Config& cfg, const ExperimentOptions& opts) {
    const std::string experiment = cfg.get_string("experiment");
    std::uint64_t seed = cfg.get_u64("seed", 0);
    if (opts.seed_override) seed = *opts.seed_override;

    std::filesystem::create_directories(opts.out_dir);

    if (experiment == "walk-ensemble") return run_walk_ensemble_experiment(cfg, opts, seed);
    if (experiment == "nrbm-paths") return run_nrbm_paths_experiment(cfg, opts, seed);
    if (experiment == "yule-martingale") return run_yule_martingale_experiment(cfg, opts, seed);
    if (experiment == "verify") return run_verify_experiment(cfg, opts, seed);
    throw std::runtime_error("config: unknown experiment '" + experiment +
                             "' (expected walk-ensemble, nrbm-paths, yule-martingale or verify)");
}

} // namespace nrbm
