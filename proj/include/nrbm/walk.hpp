#pragma once

// Step-reinforced random walks.
//
// The recursion: X^1 = X_1, and for i >= 2, with probability p the step
// repeats a uniformly chosen previous step, otherwise it is a fresh draw
// from the step law.  The walk is the sequence of partial sums.
//
// Generation is inherently sequential (resampling needs the whole history),
// so a path costs O(n) memory; ensembles parallelize across replicas with
// one RngStream per replica.
//
// Per step the stream is consumed in a fixed order: one uniform for the
// repeat/fresh decision, then either one bounded integer (repeat) or the
// law's draws (fresh).  Identical (params, seed) therefore reproduce the
// path bit for bit.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "nrbm/rng.hpp"
#include "nrbm/step_law.hpp"

namespace nrbm {

struct WalkParams {
    double p = 0.25;               // reinforcement parameter, in (0,1)
    std::size_t n = 1;             // walk length, >= 1
    StepLaw law = StepLaw::rademacher();
    std::uint64_t seed = 0;
    bool track_origins = false;
    // Test-only escape hatch: p = 0 (plain i.i.d. walk) and p = 1 (every step
    // repeats the first) are useful oracles but are not reinforced walks.
    bool allow_boundary_p = false;
};

struct WalkPath {
    std::vector<double> steps;        // reinforced steps, 0-based
    std::vector<double> sums;         // prefix sums, sums[k] = steps[0] + .. + steps[k]
    std::vector<std::uint8_t> eps;    // eps[i] = 1 iff step i repeated a previous one; eps[0] = 0
    std::vector<std::size_t> origin;  // index of the fresh draw each step copies; empty unless tracked

    double max_abs_sum() const {
        double m = 0.0;
        for (double s : sums) m = std::max(m, std::abs(s));
        return m;
    }
};

namespace detail {

inline void validate_walk_params(const WalkParams& params) {
    const bool interior = params.p > 0.0 && params.p < 1.0;
    const bool boundary = params.p == 0.0 || params.p == 1.0;
    if (!(interior || (boundary && params.allow_boundary_p)))
        throw std::invalid_argument("WalkParams: p must lie in (0,1)");
    if (params.n == 0) throw std::invalid_argument("WalkParams: n must be >= 1");
}

} // namespace detail

/// One further reinforced step given an existing prefix.
inline double sample_next_step(const WalkPath& prefix, double p, const StepLaw& law, RngStream& rng) {
    const std::size_t i = prefix.steps.size();
    if (i == 0) return law.sample(rng);
    if (rng.next_double() < p) {
        const auto u = static_cast<std::size_t>(rng.next_below(i));
        return prefix.steps[u];
    }
    return law.sample(rng);
}

inline WalkPath simulate_walk(const WalkParams& params, RngStream& rng) {
    detail::validate_walk_params(params);
    const std::size_t n = params.n;

    WalkPath path;
    path.steps.reserve(n);
    path.sums.reserve(n);
    path.eps.reserve(n);
    if (params.track_origins) path.origin.reserve(n);

    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double x;
        bool repeated = false;
        std::size_t org = i;
        if (i == 0) {
            x = params.law.sample(rng);
        } else if (rng.next_double() < params.p) {
            repeated = true;
            const auto u = static_cast<std::size_t>(rng.next_below(i));
            x = path.steps[u];
            if (params.track_origins) org = path.origin[u];
        } else {
            x = params.law.sample(rng);
        }
        sum += x;
        path.steps.push_back(x);
        path.sums.push_back(sum);
        path.eps.push_back(repeated ? 1 : 0);
        if (params.track_origins) path.origin.push_back(org);
    }
    return path;
}

inline WalkPath simulate_walk(const WalkParams& params) {
    RngStream rng(params.seed);
    return simulate_walk(params, rng);
}

/// Elephant random walk with memory parameter q in (1/2, 1): the rademacher
/// step-reinforced walk with p = 2q - 1.
inline WalkPath elephant_walk(double q, std::size_t n, std::uint64_t seed, bool track_origins = false) {
    if (!(q > 0.5 && q < 1.0))
        throw std::domain_error("elephant_walk: memory parameter q must lie in (1/2,1)");
    WalkParams params;
    params.p = 2.0 * q - 1.0;
    params.n = n;
    params.law = StepLaw::rademacher();
    params.seed = seed;
    params.track_origins = track_origins;
    return simulate_walk(params);
}

struct RepetitionCounts {
    // r[i] = number of occurrences of the fresh variable drawn at position i
    // among the first n reinforced steps; 0 whenever position i repeated.
    std::vector<std::size_t> r;

    std::size_t total() const {
        std::size_t t = 0;
        for (std::size_t c : r) t += c;
        return t;
    }
};

inline RepetitionCounts repetition_counts(const WalkPath& path) {
    if (path.origin.size() != path.steps.size())
        throw std::logic_error("repetition_counts: path was generated without track_origins");
    RepetitionCounts rc;
    rc.r.assign(path.steps.size(), 0);
    for (std::size_t o : path.origin) ++rc.r[o];
    return rc;
}

struct TruncatedDecomposition {
    std::vector<double> sums_b;    // walk of the truncated steps 1{|x|<=b} x - E(X 1{|X|<=b})
    std::vector<double> residual;  // (sums[k] - (k+1) E(X)) - sums_b[k], so the centered walk
                                   // splits exactly as sums_b + residual for every k
};

/// Split a path into its truncated walk and the residual, sharing the path's
/// repeat decisions and selection indices (copies of a step truncate to
/// copies of its truncation, so sums_b is itself a reinforced walk whose
/// typical step is the truncated law).
inline TruncatedDecomposition truncated_decomposition(const WalkPath& path, const StepLaw& law, double b) {
    if (!(b > 0.0)) throw std::invalid_argument("truncated_decomposition: requires b > 0");
    const double shift = law.restricted_mean(b);
    const double mean = law.mean();

    TruncatedDecomposition dec;
    const std::size_t n = path.steps.size();
    dec.sums_b.reserve(n);
    dec.residual.reserve(n);
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double x = path.steps[k];
        acc += (std::abs(x) <= b ? x : 0.0) - shift;
        dec.sums_b.push_back(acc);
        dec.residual.push_back(path.sums[k] - static_cast<double>(k + 1) * mean - acc);
    }
    return dec;
}

/// E(next step | history) = (1-p) E(X) + p * prefix_sum / n.
inline double conditional_step_mean(double prefix_sum, std::size_t n, double p, const StepLaw& law) {
    if (n == 0) throw std::invalid_argument("conditional_step_mean: n must be >= 1");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("conditional_step_mean: p must lie in [0,1]");
    return (1.0 - p) * law.mean() + p * prefix_sum / static_cast<double>(n);
}

} // namespace nrbm
