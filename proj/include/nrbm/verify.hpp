#pragma once

// Preset verification suites.
//
// Each preset runs a batch of Monte Carlo checks against closed-form targets
// of the walk/process/embedding identities and returns StatReports; "all"
// runs every preset.  Checks use 4-standard-error tolerances for moment
// matches and p > 0.01 for KS tests unless a wider absolute band is stated.
// The iterated-logarithm preset is qualitative: its reports are marked
// warn-only and never fail a suite by themselves.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "nrbm/ensemble.hpp"
#include "nrbm/nrbm.hpp"
#include "nrbm/stats.hpp"
#include "nrbm/walk.hpp"
#include "nrbm/walk_ensemble.hpp"
#include "nrbm/yule.hpp"

namespace nrbm {

struct VerifyOptions {
    std::uint64_t seed = 7;
    unsigned threads = 0;       // 0 = all cores
    std::size_t replicas = 0;   // 0 = preset default; otherwise overrides the headline ensemble size
};

namespace detail {

inline std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t tag) {
    return mix64(seed ^ mix64(tag + kGoldenGamma));
}

inline StatReport abs_tol_report(std::string name, double estimate, double se, double target,
                                 double tol) {
    StatReport r;
    r.name = std::move(name);
    r.estimate = estimate;
    r.std_error = se;
    r.target = target;
    r.tolerance = tol;
    r.pass = std::abs(estimate - target) <= tol;
    return r;
}

} // namespace detail

// --- criterion 1: covariance kernel of the exact sampler ---
inline std::vector<StatReport> verify_covariance(const VerifyOptions& opts) {
    const std::size_t n = opts.replicas ? opts.replicas : 100'000;
    const ReinforcementP p(0.25);
    const Grid grid({0.5, 1.0, 2.0});
    auto paths = run_replicas<std::array<double, 3>>(
        n, detail::sub_seed(opts.seed, 1), opts.threads, [&](std::size_t, RngStream& rng) {
            const auto path = sample_exact(p, grid, rng);
            return std::array<double, 3>{path.values[0], path.values[1], path.values[2]};
        });
    std::vector<double> at1(n), at2(n);
    for (std::size_t i = 0; i < n; ++i) {
        at1[i] = paths[i][1];
        at2[i] = paths[i][2];
    }
    std::vector<StatReport> reports;
    const auto cov = empirical_covariance(at1, at2);
    reports.push_back(moment_report("covariance/cov(1,2)", cov.covariance, cov.se,
                                    covariance(p, 1.0, 2.0))); // 2.378414...
    const auto mv = mean_var_ci(at1);
    reports.push_back(moment_report("covariance/var(1)", mv.variance, mv.se_var, covariance(p, 1.0, 1.0)));
    return reports;
}

// --- criterion 2: exact, Cholesky and Euler samplers agree in law at t=1 ---
inline std::vector<StatReport> verify_samplers(const VerifyOptions& opts) {
    const std::size_t n = opts.replicas ? opts.replicas : 5000;
    const ReinforcementP p(0.25);
    const Grid grid({1.0});
    std::vector<StatReport> reports;
    for (std::uint64_t master = 0; master < 5; ++master) {
        const std::uint64_t base = detail::sub_seed(opts.seed, 100 + master);
        auto exact = run_replicas<double>(n, detail::sub_seed(base, 1), opts.threads,
                                          [&](std::size_t, RngStream& rng) {
                                              return sample_exact(p, grid, rng).values[0];
                                          });
        auto chol = run_replicas<double>(n, detail::sub_seed(base, 2), opts.threads,
                                         [&](std::size_t, RngStream& rng) {
                                             return sample_cholesky(p, grid, rng).values[0];
                                         });
        auto euler = run_replicas<double>(n, detail::sub_seed(base, 3), opts.threads,
                                          [&](std::size_t, RngStream& rng) {
                                              return sample_euler(p, grid, rng, 1e-4, 10'000).values[0];
                                          });
        const std::string tag = "samplers/seed" + std::to_string(master);
        const auto ks_ec = ks_two_sample(exact, chol);
        reports.push_back(pvalue_report(tag + "/exact-vs-cholesky", ks_ec.d, ks_ec.p_value));
        const auto ks_ee = ks_two_sample(exact, euler);
        reports.push_back(pvalue_report(tag + "/exact-vs-euler", ks_ee.d, ks_ee.p_value));
        const auto ks_ce = ks_two_sample(chol, euler);
        reports.push_back(pvalue_report(tag + "/cholesky-vs-euler", ks_ce.d, ks_ce.p_value));
    }
    return reports;
}

namespace detail {

/// Marginal FCLT checks for one step law: variance, endpoint normality and
/// the two-time covariance against the kernel.  Returns the normalized
/// endpoints for cross-law comparisons.
inline std::vector<double> fclt_checks(const std::string& prefix, const StepLaw& law,
                                       const VerifyOptions& opts, std::uint64_t tag,
                                       std::vector<StatReport>& reports) {
    const std::size_t replicas = opts.replicas ? opts.replicas : 10'000;
    const double p = 0.25;
    const std::size_t n = 10'000;
    const double sigma2 = law.variance();
    const double mean = law.mean();
    auto ens = run_walk_ensemble(p, n, law, {n / 2, n}, replicas, sub_seed(opts.seed, tag),
                                 opts.threads);

    const double nd = static_cast<double>(n);
    std::vector<double> norm_var(replicas), norm_ks(replicas), half(replicas), full(replicas);
    for (std::size_t r = 0; r < replicas; ++r) {
        const double c_half = ens.s[0][r] - (nd / 2.0) * mean;
        const double c_full = ens.s[1][r] - nd * mean;
        half[r] = c_half;
        full[r] = c_full;
        norm_var[r] = c_full / std::sqrt(nd);
        norm_ks[r] = c_full / std::sqrt(2.0 * nd * sigma2);
    }

    const auto mv = mean_var_ci(norm_var);
    const double var_target = sigma2 / (1.0 - 2.0 * p); // 2 sigma^2 at p = 1/4
    reports.push_back(abs_tol_report(prefix + "/var", mv.variance, mv.se_var, var_target,
                                     0.05 * var_target));
    const auto ks = ks_test_normal(norm_ks, 1.0);
    reports.push_back(pvalue_report(prefix + "/ks-normal", ks.d, ks.p_value));

    // Cov(S(n/2), S(n))/n -> sigma^2 K(1/2, 1) with the unit-variance kernel
    const auto cov = empirical_covariance(half, full);
    const double kernel_target = sigma2 * std::pow(0.5, 1.0 - p) / (1.0 - 2.0 * p); // 1.1892 sigma^2
    reports.push_back(moment_report(prefix + "/two-time-cov", cov.covariance / nd, cov.se / nd,
                                    kernel_target));
    return norm_ks;
}

} // namespace detail

// --- criterion 3: FCLT marginals for the rademacher walk ---
inline std::vector<StatReport> verify_fclt(const VerifyOptions& opts) {
    std::vector<StatReport> reports;
    detail::fclt_checks("fclt", StepLaw::rademacher(), opts, 300, reports);
    return reports;
}

// --- criterion 4: universality -- same limits for unit-variance uniform steps ---
inline std::vector<StatReport> verify_universality(const VerifyOptions& opts) {
    std::vector<StatReport> reports;
    const double s3 = std::sqrt(3.0);
    auto rade = detail::fclt_checks("universality/rademacher", StepLaw::rademacher(), opts, 400, reports);
    auto unif = detail::fclt_checks("universality/uniform", StepLaw::uniform(-s3, s3), opts, 401, reports);
    const auto ks = ks_two_sample(std::move(rade), std::move(unif));
    reports.push_back(pvalue_report("universality/cross-law-ks", ks.d, ks.p_value));
    return reports;
}

// --- criterion 5: martingale moment identities at t = 2 ---
inline std::vector<StatReport> verify_martingale(const VerifyOptions& opts) {
    const std::size_t runs = opts.replicas ? opts.replicas : 20'000;
    const double p = 0.25, t = 2.0;
    const StepLaw law = StepLaw::rademacher();
    struct Obs {
        double m, sq, angle;
    };
    auto obs = run_replicas<Obs>(runs, detail::sub_seed(opts.seed, 500), opts.threads,
                                 [&](std::size_t, RngStream& rng) {
                                     const auto mp = embed_martingale(p, law, t, rng);
                                     return Obs{mp.martingale.back(), mp.square_bracket.back(),
                                                mp.angle_bracket.back()};
                                 });
    std::vector<double> m(runs), sq(runs), diff(runs);
    for (std::size_t i = 0; i < runs; ++i) {
        m[i] = obs[i].m;
        sq[i] = obs[i].sq;
        diff[i] = obs[i].angle - obs[i].sq;
    }
    std::vector<StatReport> reports;
    const auto mv_m = mean_var_ci(m);
    reports.push_back(moment_report("martingale/mean", mv_m.mean, mv_m.se_mean, 0.0));
    const auto mv_sq = mean_var_ci(sq);
    const double sq_target = (std::exp((1.0 - 2.0 * p) * t) - 1.0) / (1.0 - 2.0 * p); // 2(e-1)
    reports.push_back(moment_report("martingale/sq-bracket-mean", mv_sq.mean, mv_sq.se_mean, sq_target));
    const auto mv_diff = mean_var_ci(diff);
    reports.push_back(moment_report("martingale/compensator-match", mv_diff.mean, mv_diff.se_mean, 0.0));
    return reports;
}

// --- criterion 6: Yule law -- exponential limit and mean growth ---
inline std::vector<StatReport> verify_yule(const VerifyOptions& opts) {
    const std::size_t ks_runs = opts.replicas ? opts.replicas : 10'000;
    const double t = 7.0;
    auto scaled = run_replicas<double>(ks_runs, detail::sub_seed(opts.seed, 600), opts.threads,
                                       [&](std::size_t, RngStream& rng) {
                                           const auto traj = simulate_yule(t, rng);
                                           return std::exp(-t) * static_cast<double>(traj.population());
                                       });
    std::vector<StatReport> reports;
    const auto ks = ks_test_exp1(std::move(scaled));
    reports.push_back(pvalue_report("yule/ks-exponential", ks.d, ks.p_value));

    const std::size_t mean_runs = 100'000;
    auto y3 = run_replicas<double>(mean_runs, detail::sub_seed(opts.seed, 601), opts.threads,
                                   [](std::size_t, RngStream& rng) {
                                       return static_cast<double>(simulate_yule(3.0, rng).population());
                                   });
    const auto mv = mean_var_ci(y3);
    reports.push_back(moment_report("yule/mean-growth", mv.mean, mv.se_mean, std::exp(3.0)));
    return reports;
}

// --- criterion 7: diffusive/super-diffusive phase transition ---
inline std::vector<StatReport> verify_phase_transition(const VerifyOptions& opts) {
    const std::size_t replicas = opts.replicas ? opts.replicas : 5000;
    const StepLaw law = StepLaw::rademacher();
    const std::vector<std::uint64_t> slope_cp = {1u << 10, 1u << 11, 1u << 12, 1u << 13, 1u << 14};
    std::vector<StatReport> reports;

    const auto slope_of = [&](double p, std::uint64_t tag) {
        auto ens = run_walk_ensemble(p, 1u << 14, law,
                                     {1u << 8, 1u << 9, 1u << 10, 1u << 11, 1u << 12, 1u << 13, 1u << 14},
                                     replicas, detail::sub_seed(opts.seed, tag), opts.threads);
        std::vector<double> ns;
        std::vector<std::vector<double>> cols;
        for (std::size_t c = 0; c < ens.checkpoints.size(); ++c)
            if (ens.checkpoints[c] >= slope_cp.front()) {
                ns.push_back(static_cast<double>(ens.checkpoints[c]));
                cols.push_back(ens.s[c]);
            }
        return std::pair{scaling_exponent(ns, cols), std::move(ens)};
    };

    auto [fit_diff, ens_diff] = slope_of(0.25, 700);
    reports.push_back(detail::abs_tol_report("phase/slope-diffusive", fit_diff.slope, fit_diff.se, 1.0, 0.1));
    auto [fit_super, ens_super] = slope_of(0.75, 701);
    reports.push_back(detail::abs_tol_report("phase/slope-superdiffusive", fit_super.slope, fit_super.se, 1.5, 0.1));

    // L^2-Cauchy decay of n^-p S(n) at p = 3/4 over the (n, 2n) pairs
    std::vector<CauchyPoint> pts;
    for (std::size_t c = 0; c + 1 < ens_super.checkpoints.size(); c += 2) {
        CauchyPoint pt;
        pt.n = static_cast<double>(ens_super.checkpoints[c]);
        pt.s_n = ens_super.s[c];
        pt.s_2n = ens_super.s[c + 1];
        if (pt.n <= 4096) pts.push_back(std::move(pt)); // pairs (2^8,2^9), (2^10,2^11), (2^12,2^13)
    }
    const auto d = cauchy_l2(0.75, pts);
    double max_ratio = 0.0;
    for (std::size_t j = 0; j + 1 < d.size(); ++j) max_ratio = std::max(max_ratio, d[j + 1] / d[j]);
    reports.push_back(detail::abs_tol_report("phase/cauchy-decreasing", max_ratio, 0.0, 0.5, 0.5));
    reports.push_back(detail::abs_tol_report("phase/cauchy-halved", d.back() / d.front(), 0.0, 0.25, 0.25));
    return reports;
}

// --- criterion 8: bridge pinning and independence from the endpoint ---
inline std::vector<StatReport> verify_bridge(const VerifyOptions& opts) {
    const std::size_t n = opts.replicas ? opts.replicas : 100'000;
    const ReinforcementP p(0.25);
    const Grid grid({0.5, 1.0});
    const double x = 0.7;
    struct Obs {
        double bridge_half, endpoint, pin_err;
    };
    auto obs = run_replicas<Obs>(n, detail::sub_seed(opts.seed, 800), opts.threads,
                                 [&](std::size_t, RngStream& rng) {
                                     const auto free_path = sample_exact(p, grid, rng);
                                     const double b =
                                         free_path.values[0] -
                                         std::pow(0.5, 1.0 - p.value()) * free_path.values[1];
                                     const auto pinned = bridge_sample(p, grid, x, rng);
                                     return Obs{b, free_path.values[1], std::abs(pinned.values[1] - x)};
                                 });
    std::vector<double> b(n), end(n);
    double max_pin = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        b[i] = obs[i].bridge_half;
        end[i] = obs[i].endpoint;
        max_pin = std::max(max_pin, obs[i].pin_err);
    }
    std::vector<StatReport> reports;
    const auto cov = empirical_covariance(b, end);
    const auto mb = mean_var_ci(b);
    const auto me = mean_var_ci(end);
    const double corr = cov.covariance / std::sqrt(mb.variance * me.variance);
    reports.push_back(moment_report("bridge/corr-with-endpoint", corr,
                                    1.0 / std::sqrt(static_cast<double>(n)), 0.0));
    reports.push_back(detail::abs_tol_report("bridge/terminal-pinning", max_pin, 0.0, 0.0, 0.0));
    return reports;
}

// --- criterion 9: Ornstein-Uhlenbeck stationarity of e^{-u/2} B^(e^u) ---
inline std::vector<StatReport> verify_ou(const VerifyOptions& opts) {
    const std::size_t n = opts.replicas ? opts.replicas : 100'000;
    const ReinforcementP p(0.25);
    const Grid tgrid({1.0, std::exp(1.0), std::exp(2.0), std::exp(3.0)});
    auto obs = run_replicas<std::array<double, 4>>(
        n, detail::sub_seed(opts.seed, 900), opts.threads, [&](std::size_t, RngStream& rng) {
            const auto ou = ou_transform(sample_exact(p, tgrid, rng));
            return std::array<double, 4>{ou.values[0], ou.values[1], ou.values[2], ou.values[3]};
        });
    std::vector<double> u1(n), u2(n);
    for (std::size_t i = 0; i < n; ++i) {
        u1[i] = obs[i][1];
        u2[i] = obs[i][2];
    }
    const double var_target = 1.0 / (1.0 - 2.0 * p.value());
    const double lag_target = std::exp(p.value() - 0.5) * var_target; // e^{-1/4}/0.5 at p=1/4
    std::vector<StatReport> reports;
    const auto mv1 = mean_var_ci(u1);
    reports.push_back(moment_report("ou/var(u=1)", mv1.variance, mv1.se_var, var_target));
    const auto mv2 = mean_var_ci(u2);
    reports.push_back(moment_report("ou/var(u=2)", mv2.variance, mv2.se_var, var_target));
    const auto cov = empirical_covariance(u1, u2);
    reports.push_back(moment_report("ou/lag1-cov", cov.covariance, cov.se, lag_target));
    return reports;
}

// --- criterion 10: exact combinatorial identities, bit for bit ---
inline std::vector<StatReport> verify_identities(const VerifyOptions& opts) {
    const std::size_t seeds = opts.replicas ? opts.replicas : 1000;
    const std::size_t n = 500;
    const std::array<double, 5> ps = {0.1, 0.25, 0.5, 0.75, 0.9};

    std::size_t violations = 0;
    for (double p : ps) {
        auto flags = run_replicas<std::uint8_t>(
            seeds, detail::sub_seed(opts.seed, 1000 + static_cast<std::uint64_t>(p * 100)), opts.threads,
            [&](std::size_t, RngStream& rng) -> std::uint8_t {
                WalkParams params;
                params.p = p;
                params.n = n;
                params.law = StepLaw::rademacher();
                params.track_origins = true;
                const auto path = simulate_walk(params, rng);
                const auto rc = repetition_counts(path);
                if (rc.total() != n) return 1;
                if (!path.eps.empty() && path.eps[0] != 0) return 1;
                double recon = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    if (path.eps[i] && rc.r[i] != 0) return 1; // repeats carry no fresh count
                    recon += static_cast<double>(rc.r[i]) * path.steps[i];
                }
                return recon == path.sums.back() ? 0 : 1; // integer sums: bitwise equality
            });
        for (auto f : flags) violations += f;
    }

    // truncated decomposition: the centered walk splits exactly, and the
    // residual matches a directly accumulated check walk
    const StepLaw unif = StepLaw::uniform(-1.0, 1.0);
    const double b = 0.5;
    const double shift = unif.restricted_mean(b);
    std::size_t dec_violations = 0;
    auto dec_flags = run_replicas<std::uint8_t>(
        200, detail::sub_seed(opts.seed, 1100), opts.threads,
        [&](std::size_t, RngStream& rng) -> std::uint8_t {
            WalkParams params;
            params.p = 0.25;
            params.n = n;
            params.law = unif;
            const auto path = simulate_walk(params, rng);
            const auto dec = truncated_decomposition(path, unif, b);
            double trunc_walk = 0.0, check_walk = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                const double centered = path.sums[k] - static_cast<double>(k + 1) * unif.mean();
                if (dec.residual[k] != centered - dec.sums_b[k]) return 1; // exact split
                const double xk = path.steps[k];
                trunc_walk += (std::abs(xk) <= b ? xk : 0.0) - shift;
                if (dec.sums_b[k] != trunc_walk) return 1; // exact truncated walk
                check_walk += (std::abs(xk) > b ? xk : 0.0) - (unif.mean() - shift);
                if (std::abs(dec.residual[k] - check_walk) > 1e-9) return 1;
            }
            return 0;
        });
    for (auto f : dec_flags) dec_violations += f;

    std::vector<StatReport> reports;
    reports.push_back(detail::abs_tol_report("identities/repetition-reconstruction",
                                             static_cast<double>(violations), 0.0, 0.0, 0.0));
    reports.push_back(detail::abs_tol_report("identities/truncated-decomposition",
                                             static_cast<double>(dec_violations), 0.0, 0.0, 0.0));
    return reports;
}

// --- criterion 11: iterated-logarithm band (qualitative, warn-only) ---
inline std::vector<StatReport> verify_lil(const VerifyOptions& opts) {
    const std::size_t paths = opts.replicas ? opts.replicas : 100;
    const ReinforcementP p(0.25);
    const Grid grid = Grid::log_spaced(10.0, 1e6, 200);
    auto stats = run_replicas<double>(paths, detail::sub_seed(opts.seed, 1200), opts.threads,
                                      [&](std::size_t, RngStream& rng) {
                                          return lil_statistic(sample_exact(p, grid, rng));
                                      });
    const auto [lo, hi] = lil_band(p.value());
    StatReport r = band_report("lil/median-sup-statistic", median(stats), lo, hi);
    r.warn_only = true;
    std::vector<StatReport> reports{std::move(r)};
    return reports;
}

struct PresetInfo {
    std::string name;
    std::string title;
    std::vector<StatReport> (*run)(const VerifyOptions&);
    std::size_t min_replicas; // overrides below this are a usage error
};

inline const std::vector<PresetInfo>& verify_presets() {
    static const std::vector<PresetInfo> presets = {
        {"covariance", "covariance kernel, exact sampler", &verify_covariance, 1000},
        {"samplers", "sampler equivalence (exact/Cholesky/Euler)", &verify_samplers, 100},
        {"fclt", "invariance-principle marginals, rademacher steps", &verify_fclt, 1000},
        {"universality", "invariance-principle marginals, uniform steps", &verify_universality, 1000},
        {"martingale", "Yule-embedded martingale identities", &verify_martingale, 1000},
        {"yule", "Yule growth and exponential limit", &verify_yule, 1000},
        {"superdiffusive", "phase transition and L2-Cauchy decay", &verify_phase_transition, 500},
        {"bridge", "bridge pinning and endpoint independence", &verify_bridge, 1000},
        {"ou", "Ornstein-Uhlenbeck stationarity", &verify_ou, 1000},
        {"identities", "exact combinatorial identities", &verify_identities, 10},
        {"lil", "iterated-logarithm band (warn-only)", &verify_lil, 10},
    };
    return presets;
}

inline std::vector<StatReport> run_preset(const std::string& name, const VerifyOptions& opts) {
    if (name == "all") {
        std::vector<StatReport> all;
        for (const auto& preset : verify_presets()) {
            auto r = preset.run(opts);
            all.insert(all.end(), r.begin(), r.end());
        }
        return all;
    }
    for (const auto& preset : verify_presets()) {
        if (preset.name == name) {
            if (opts.replicas != 0 && opts.replicas < preset.min_replicas)
                throw std::invalid_argument("verify: preset '" + name + "' needs at least " +
                                            std::to_string(preset.min_replicas) + " replicas");
            return preset.run(opts);
        }
    }
    throw std::invalid_argument("verify: unknown preset '" + name + "'");
}

} // namespace nrbm
