#pragma once

// Yule embedding of a step-reinforced walk.
//
// A standard Yule process Y (pure birth, rate n from state n, Y_0 = 1) is
// coupled with a reinforced walk so that  M(t) = e^{-pt} S(Y_t)  is a
// square-integrable martingale with finite variation.  Steps are drawn on
// demand as the population grows, from a stream derived independently of the
// Yule clock, so S and Y stay independent.
//
// Conventions, fixed throughout:
//   - the walk's first step is present at time 0 (the ancestor carries it),
//     so M(0) = X_1 and E(M(t)^2) = sigma^2 + E[M](t);
//   - the square bracket  [M](t) = sum over birth times s <= t of
//     e^{-2ps} X(Y_s)^2  runs over (0, t], excluding the time-0 jump;
//   - the angle bracket integrand uses (1-p) sigma^2 Y_s for a general
//     centered law, which reduces to the unit-variance form when sigma = 1.
//
// The angle bracket is piecewise exponential-affine in closed form, so its
// inverse time change T is found by locating the segment and inverting the
// exponential exactly.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "nrbm/process.hpp"
#include "nrbm/rng.hpp"
#include "nrbm/step_law.hpp"

namespace nrbm {

struct YuleTrajectory {
    std::vector<double> jump_times; // jump_times[0] = 0 carries the ancestor; births afterwards
    double horizon = 0.0;           // simulated-through time
    bool truncated = false;         // population cap hit before the requested horizon

    /// Y(horizon).
    std::size_t population() const { return jump_times.size(); }

    /// Y(t) = 1 + number of birth times <= t.
    std::size_t population_at(double t) const {
        if (!(t >= 0.0 && t <= horizon))
            throw std::out_of_range("YuleTrajectory: time outside simulated range");
        return static_cast<std::size_t>(
            std::upper_bound(jump_times.begin(), jump_times.end(), t) - jump_times.begin());
    }
};

inline YuleTrajectory simulate_yule(double horizon, RngStream& rng, std::size_t max_pop = 10'000'000) {
    if (!(horizon >= 0.0) || !std::isfinite(horizon))
        throw std::invalid_argument("simulate_yule: horizon must be finite and >= 0");
    if (max_pop < 1) throw std::invalid_argument("simulate_yule: max_pop must be >= 1");
    YuleTrajectory traj;
    traj.jump_times.push_back(0.0);
    double t = 0.0;
    std::size_t pop = 1;
    while (true) {
        const double hold = rng.next_exponential() / static_cast<double>(pop);
        if (t + hold >= horizon) {
            traj.horizon = horizon;
            return traj;
        }
        if (pop >= max_pop) {
            traj.horizon = t; // stop where the record is still complete
            traj.truncated = true;
            return traj;
        }
        t += hold;
        traj.jump_times.push_back(t);
        ++pop;
    }
}

inline YuleTrajectory simulate_yule_to_pop(std::size_t target_pop, RngStream& rng) {
    if (target_pop < 1) throw std::invalid_argument("simulate_yule_to_pop: target must be >= 1");
    YuleTrajectory traj;
    traj.jump_times.reserve(target_pop);
    traj.jump_times.push_back(0.0);
    double t = 0.0;
    for (std::size_t pop = 1; pop < target_pop; ++pop) {
        t += rng.next_exponential() / static_cast<double>(pop);
        traj.jump_times.push_back(t);
    }
    traj.horizon = t;
    return traj;
}

struct EmbedOptions {
    std::size_t max_pop = 10'000'000; // hard memory bound; exceeding it throws rather than truncates
    // Optional early stop: end the record at the first birth whose angle
    // bracket reaches this value.  Useful when only <M> coverage up to a
    // known target matters (the rescaled martingale needs <M> >= n t).
    double stop_at_angle = std::numeric_limits<double>::infinity();
};

struct MartingalePath {
    double p = 0.0;
    double sigma2 = 0.0;
    double horizon = 0.0;  // actual end time of the record
    double tau_hat = 0.0;  // e^{-horizon} Y(horizon)
    std::size_t births = 0;

    // One row per event: row 0 is time 0 (ancestor), rows 1..births are birth
    // times, and, unless the record ended exactly at a birth, a final row at
    // the horizon.
    std::vector<double> times;
    std::vector<double> martingale;      // M(t) at each row
    std::vector<double> step_square_sum; // V(Y_t) = X(1)^2 + ... + X(Y_t)^2
    std::vector<double> square_bracket;  // [M](t)
    std::vector<double> angle_bracket;   // <M>(t)

    std::size_t rows() const { return times.size(); }

    std::size_t population_after_row(std::size_t k) const { return std::min(k + 1, births + 1); }

    /// M decays as e^{-p dt} between events.
    double martingale_at(double t) const {
        const std::size_t j = segment_of(t);
        return martingale[j] * std::exp(-p * (t - times[j]));
    }

    double angle_at(double t) const {
        const std::size_t j = segment_of(t);
        const double c = segment_rate(j);
        return angle_bracket[j] +
               c * (std::exp(-2.0 * p * times[j]) - std::exp(-2.0 * p * t)) / (2.0 * p);
    }

    /// Integrand constant of the angle bracket on segment j:
    /// p V(Y) + (1-p) sigma^2 Y.
    double segment_rate(std::size_t j) const {
        return p * step_square_sum[j] +
               (1.0 - p) * sigma2 * static_cast<double>(population_after_row(j));
    }

    std::size_t segment_of(double t) const {
        if (!(t >= 0.0 && t <= horizon))
            throw std::out_of_range("MartingalePath: time outside the simulated range");
        const auto it = std::upper_bound(times.begin(), times.end(), t);
        return static_cast<std::size_t>(it - times.begin()) - 1;
    }
};

/// Couple a Yule process with a reinforced walk on a centered law and record
/// M, V, [M] and <M> along the jump times up to the horizon.
inline MartingalePath embed_martingale(double p, const StepLaw& law, double horizon, RngStream& rng,
                                       const EmbedOptions& opts = {}) {
    if (!(p > 0.0 && p < 0.5))
        throw std::domain_error("embed_martingale: p must lie in (0, 1/2)");
    if (std::abs(law.mean()) > 1e-12)
        throw std::invalid_argument("embed_martingale: the step law must be centered (use StepLaw::centered)");
    if (!(horizon >= 0.0) || !std::isfinite(horizon))
        throw std::invalid_argument("embed_martingale: horizon must be finite and >= 0");

    RngStream clock = rng.derive(0x59756c65);  // birth times
    RngStream walker = rng.derive(0x53746570); // reinforced steps

    MartingalePath mp;
    mp.p = p;
    mp.sigma2 = law.variance();

    // E(Y_t) = e^t; reserve a bit above it to keep reallocation rare
    const double expected_rows = std::min(std::exp(horizon) * 1.3 + 64.0,
                                          static_cast<double>(opts.max_pop) + 2.0);
    const auto reserve_rows = static_cast<std::size_t>(expected_rows);
    mp.times.reserve(reserve_rows);
    mp.martingale.reserve(reserve_rows);
    mp.step_square_sum.reserve(reserve_rows);
    mp.square_bracket.reserve(reserve_rows);
    mp.angle_bracket.reserve(reserve_rows);

    std::vector<double> steps;
    steps.reserve(reserve_rows);
    const double x1 = law.sample(walker);
    steps.push_back(x1);
    double sum = x1, vsum = x1 * x1, sq = 0.0, angle = 0.0;
    double t = 0.0, e2p_prev = 1.0;
    std::size_t pop = 1;

    auto push_row = [&](double when, double e2p_when) {
        mp.times.push_back(when);
        mp.martingale.push_back(sum * std::sqrt(e2p_when));
        mp.step_square_sum.push_back(vsum);
        mp.square_bracket.push_back(sq);
        mp.angle_bracket.push_back(angle);
    };
    push_row(0.0, 1.0);

    if (horizon > 0.0) {
        while (true) {
            const double hold = clock.next_exponential() / static_cast<double>(pop);
            const double rate = p * vsum + (1.0 - p) * mp.sigma2 * static_cast<double>(pop);
            if (t + hold >= horizon) {
                const double e2p_h = std::exp(-2.0 * p * horizon);
                angle += rate * (e2p_prev - e2p_h) / (2.0 * p);
                push_row(horizon, e2p_h);
                t = horizon;
                break;
            }
            if (pop >= opts.max_pop)
                throw std::runtime_error(
                    "embed_martingale: population cap " + std::to_string(opts.max_pop) +
                    " reached at t=" + std::to_string(t + hold) +
                    " before horizon; raise EmbedOptions::max_pop or lower the horizon");
            t += hold;
            const double e2p = std::exp(-2.0 * p * t);
            angle += rate * (e2p_prev - e2p) / (2.0 * p);
            e2p_prev = e2p;

            double x;
            if (walker.next_double() < p)
                x = steps[walker.next_below(pop)];
            else
                x = law.sample(walker);
            steps.push_back(x);
            ++pop;
            sum += x;
            vsum += x * x;
            sq += e2p * x * x;
            push_row(t, e2p);
            ++mp.births;

            if (angle >= opts.stop_at_angle) break; // record ends at this birth
        }
    }
    mp.horizon = t;
    mp.tau_hat = std::exp(-t) * static_cast<double>(pop);
    return mp;
}

inline std::vector<double> square_bracket(const MartingalePath& mp) { return mp.square_bracket; }
inline std::vector<double> angle_bracket(const MartingalePath& mp) { return mp.angle_bracket; }

/// Inverse of the angle bracket: the unique T with <M>(T) = target, found by
/// locating the segment and inverting its closed form (well below 1e-10
/// absolute error).  Targets beyond <M>(horizon) raise std::out_of_range with
/// a hint for the horizon that would cover them.
inline double invert_time_change(const MartingalePath& mp, double target) {
    if (!(target >= 0.0)) throw std::invalid_argument("invert_time_change: target must be >= 0");
    const auto& a = mp.angle_bracket;
    const double total = a.back();
    if (target > total) {
        const double hint =
            std::log(std::max((1.0 - 2.0 * mp.p) * target / std::max(mp.tau_hat, 1e-12), 2.0)) /
                (1.0 - 2.0 * mp.p) + 1.0;
        throw std::out_of_range("invert_time_change: target " + std::to_string(target) +
                                " exceeds <M>(horizon) = " + std::to_string(total) +
                                "; a horizon of about " + std::to_string(hint) + " would cover it");
    }
    if (mp.rows() == 1) return 0.0;
    auto it = std::upper_bound(a.begin(), a.end(), target);
    auto j = static_cast<std::size_t>(it - a.begin());
    j = (j == 0) ? 0 : j - 1;
    j = std::min(j, mp.rows() - 2);

    const double c = mp.segment_rate(j);
    const double ej = std::exp(-2.0 * mp.p * mp.times[j]);
    const double e2pt = ej - 2.0 * mp.p * (target - a[j]) / c;
    double t = -std::log(e2pt) / (2.0 * mp.p);
    return std::clamp(t, mp.times[j], mp.times[j + 1]);
}

/// Rescaled martingale N_n(t) = M(T(n t)) / sqrt(n) on a grid; requires the
/// record's angle bracket to cover n * max(grid).
inline ProcessPath rescaled_martingale(const MartingalePath& mp, std::size_t n, const Grid& t_grid) {
    if (n < 1) throw std::invalid_argument("rescaled_martingale: n must be >= 1");
    const double root_n = std::sqrt(static_cast<double>(n));
    std::vector<double> values(t_grid.size());
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        const double target = static_cast<double>(n) * t_grid.times()[i];
        values[i] = mp.martingale_at(invert_time_change(mp, target)) / root_n;
    }
    return ProcessPath(t_grid, std::move(values));
}

} // namespace nrbm
