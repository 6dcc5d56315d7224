#pragma once

// Deterministic parallel map over Monte Carlo replicas.
//
// Replica k always draws from RngStream(master_seed, k), and results are
// stored by replica index, so the output is independent of the thread count
// and of scheduling.

#include <atomic>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

#include "nrbm/rng.hpp"

namespace nrbm {

inline unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

/// fn(replica_index, stream) -> T, evaluated for every replica.
template <typename T, typename Fn>
std::vector<T> run_replicas(std::size_t replicas, std::uint64_t master_seed, unsigned threads, Fn&& fn) {
    std::vector<T> results(replicas);
    const unsigned nthreads = std::min<std::size_t>(resolve_threads(threads), std::max<std::size_t>(replicas, 1));
    if (nthreads <= 1) {
        for (std::size_t k = 0; k < replicas; ++k) {
            RngStream stream(master_seed, k);
            results[k] = fn(k, stream);
        }
        return results;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    auto worker = [&] {
        while (true) {
            const std::size_t k = next.fetch_add(1);
            if (k >= replicas || failed.load(std::memory_order_relaxed)) return;
            try {
                RngStream stream(master_seed, k);
                results[k] = fn(k, stream);
            } catch (...) {
                if (!failed.exchange(true)) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (unsigned i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failed) std::rethrow_exception(error);
    return results;
}

} // namespace nrbm
