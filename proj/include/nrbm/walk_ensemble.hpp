#pragma once

// Replica ensembles of reinforced walks, recorded at checkpoints.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "nrbm/ensemble.hpp"
#include "nrbm/walk.hpp"

namespace nrbm {

/// Walk values collected at checkpoints, one column per checkpoint.
struct WalkEnsemble {
    std::vector<std::uint64_t> checkpoints;
    std::vector<std::vector<double>> s;       // s[c][replica] = raw walk value at checkpoint c
    std::vector<std::vector<double>> max_abs; // running max of |S| up to the checkpoint
};

inline WalkEnsemble run_walk_ensemble(double p, std::size_t n, const StepLaw& law,
                                      std::vector<std::uint64_t> checkpoints, std::size_t replicas,
                                      std::uint64_t master_seed, unsigned threads,
                                      bool allow_boundary_p = false) {
    if (checkpoints.empty()) throw std::invalid_argument("walk ensemble: no checkpoints");
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
        if (checkpoints[i] == 0 || checkpoints[i] > n)
            throw std::invalid_argument("walk ensemble: checkpoints must lie in [1, n]");
        if (i > 0 && checkpoints[i] <= checkpoints[i - 1])
            throw std::invalid_argument("walk ensemble: checkpoints must be strictly increasing");
    }

    struct Row {
        std::vector<double> s, m;
    };
    WalkParams params;
    params.p = p;
    params.n = n;
    params.law = law;
    params.track_origins = false;
    params.allow_boundary_p = allow_boundary_p;

    auto rows = run_replicas<Row>(replicas, master_seed, threads, [&](std::size_t, RngStream& rng) {
        const WalkPath path = simulate_walk(params, rng);
        Row row;
        row.s.reserve(checkpoints.size());
        row.m.reserve(checkpoints.size());
        double running = 0.0;
        std::size_t c = 0;
        for (std::size_t k = 0; k < n && c < checkpoints.size(); ++k) {
            running = std::max(running, std::abs(path.sums[k]));
            if (k + 1 == checkpoints[c]) {
                row.s.push_back(path.sums[k]);
                row.m.push_back(running);
                ++c;
            }
        }
        return row;
    });

    WalkEnsemble out;
    out.checkpoints = std::move(checkpoints);
    out.s.assign(out.checkpoints.size(), std::vector<double>(replicas));
    out.max_abs.assign(out.checkpoints.size(), std::vector<double>(replicas));
    for (std::size_t r = 0; r < replicas; ++r)
        for (std::size_t c = 0; c < out.checkpoints.size(); ++c) {
            out.s[c][r] = rows[r].s[c];
            out.max_abs[c][r] = rows[r].m[c];
        }
    return out;
}

} // namespace nrbm
