// Acceptance suite: runs every verification preset at its pinned tolerance
// and prints one pass/fail line per criterion.  Exit code 0 iff every
// non-warn check passes.
//
// Usage: nrbm_acceptance [seed] [threads]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "nrbm/verify.hpp"

int main(int argc, char** argv) {
    nrbm::VerifyOptions opts;
    opts.seed = 8;
    if (argc > 1) opts.seed = std::strtoull(argv[1], nullptr, 10);
    if (argc > 2) opts.threads = static_cast<unsigned>(std::strtoul(argv[2], nullptr, 10));

    std::printf("acceptance suite, seed %llu\n", static_cast<unsigned long long>(opts.seed));
    std::size_t criterion = 0;
    std::size_t hard_failures = 0;
    for (const auto& preset : nrbm::verify_presets()) {
        ++criterion;
        const auto start = std::chrono::steady_clock::now();
        std::vector<nrbm::StatReport> reports;
        bool threw = false;
        std::string what;
        try {
            reports = preset.run(opts);
        } catch (const std::exception& e) {
            threw = true;
            what = e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

        bool pass = !threw;
        bool warn = false;
        for (const auto& r : reports) {
            if (!r.pass && r.warn_only) warn = true;
            if (!r.pass && !r.warn_only) pass = false;
        }
        if (!pass) ++hard_failures;

        std::printf("[%s] criterion %2zu (%s): %s  [%.1fs]\n",
                    pass ? (warn ? "WARN" : "PASS") : "FAIL", criterion, preset.name.c_str(),
                    preset.title.c_str(), secs);
        if (threw) std::printf("       error: %s\n", what.c_str());
        for (const auto& r : reports) {
            if (r.pass) continue;
            std::printf("       %s %s: estimate %.6g", r.warn_only ? "warn" : "FAILED",
                        r.name.c_str(), r.estimate);
            if (r.p_value)
                std::printf(", p-value %.4g (threshold %.4g)\n", *r.p_value, r.target);
            else
                std::printf(", target %.6g +/- %.6g\n", r.target, r.tolerance);
        }
    }

    if (hard_failures == 0) {
        std::printf("acceptance: all %zu criteria passed\n", criterion);
        return 0;
    }
    std::printf("acceptance: %zu criterion(s) FAILED\n", hard_failures);
    return 1;
}
