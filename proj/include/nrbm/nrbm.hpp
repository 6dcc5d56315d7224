#pragma once

// Noise reinforced Brownian motion: the centered Gaussian process with
// covariance  E(B^(s) B^(t)) = min(s,t)^{1-p} max(s,t)^p / (1-2p),
// defined for reinforcement parameters p in (0, 1/2).
//
// Three samplers are provided:
//   sample_exact    - time change of a standard Brownian motion,
//                     t^p B(t^{1-2p}) / sqrt(1-2p); exact finite-dimensional
//                     law at O(n) per path.  This is the primary sampler.
//   sample_cholesky - factor the kernel matrix; O(n^3) setup, kept as an
//                     independent oracle for the exact sampler.
//   sample_euler    - Euler-Maruyama on the SDE dX = dB + (p/t) X dt started
//                     from an exact marginal at t0 > 0 (the drift p/t rules
//                     out starting at 0); weak order 1, bias shrinks with
//                     substeps.  The refinement is log-spaced to match the
//                     1/t drift scale.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "nrbm/process.hpp"
#include "nrbm/rng.hpp"
#include "nrbm/stats.hpp"

namespace nrbm {

/// Reinforcement parameter restricted to the diffusive range (0, 1/2).
class ReinforcementP {
public:
    explicit ReinforcementP(double p) : p_(p) {
        if (!(p > 0.0 && p < 0.5))
            throw std::domain_error("ReinforcementP: p must lie in (0, 1/2)");
    }

    /// Test-only: bypass the range check (p = 0 degenerates to standard
    /// Brownian motion, a useful oracle).
    static ReinforcementP unchecked(double p) {
        ReinforcementP out;
        out.p_ = p;
        return out;
    }

    double value() const { return p_; }

private:
    ReinforcementP() = default;
    double p_ = 0.25;
};

/// Covariance kernel; symmetric in (s,t), zero when either argument is 0.
inline double covariance(ReinforcementP p, double s, double t) {
    if (!(s >= 0.0 && t >= 0.0)) throw std::domain_error("covariance: times must be >= 0");
    const double lo = std::min(s, t), hi = std::max(s, t);
    if (lo == 0.0) return 0.0;
    const double pv = p.value();
    return std::pow(lo, 1.0 - pv) * std::pow(hi, pv) / (1.0 - 2.0 * pv);
}

/// Exact sampler via the Brownian time change.
inline ProcessPath sample_exact(ReinforcementP p, const Grid& grid, RngStream& rng) {
    const double pv = p.value();
    const double norm = 1.0 / std::sqrt(1.0 - 2.0 * pv);
    std::vector<double> values(grid.size());
    double bm = 0.0;   // B at the transformed time u = t^{1-2p}
    double u_prev = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double t = grid.times()[i];
        if (t == 0.0) {
            values[i] = 0.0;
            continue;
        }
        const double u = std::pow(t, 1.0 - 2.0 * pv);
        bm += std::sqrt(u - u_prev) * rng.next_gaussian();
        u_prev = u;
        values[i] = std::pow(t, pv) * bm * norm;
    }
    return ProcessPath(grid, std::move(values));
}

namespace detail {

/// In-place lower Cholesky of the row-major n x n matrix a; false on failure.
inline bool cholesky_lower(std::vector<double>& a, std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) {
        double d = a[j * n + j];
        for (std::size_t k = 0; k < j; ++k) d -= a[j * n + k] * a[j * n + k];
        if (!(d > 0.0)) return false;
        const double l = std::sqrt(d);
        a[j * n + j] = l;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a[i * n + j];
            for (std::size_t k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
            a[i * n + j] = s / l;
        }
    }
    // zero the strict upper triangle so the factor can be used directly
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) a[i * n + j] = 0.0;
    return true;
}

} // namespace detail

/// Kernel matrix of the process on the positive part of a grid (a leading
/// t = 0 is pinned to value 0 by the samplers, so it is excluded here).
inline std::vector<double> kernel_matrix(ReinforcementP p, const std::vector<double>& times) {
    const std::size_t n = times.size();
    std::vector<double> k(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j)
            k[i * n + j] = k[j * n + i] = covariance(p, times[i], times[j]);
    return k;
}

/// Oracle sampler from the factored kernel matrix.  A leading grid time of 0
/// contributes a deterministic 0.  Near-coincident times can push the matrix
/// to the edge of positive definiteness; one retry adds a relative jitter of
/// 1e-12 on the diagonal before giving up.
inline ProcessPath sample_cholesky(ReinforcementP p, const Grid& grid, RngStream& rng) {
    std::vector<double> times = grid.times();
    const bool leading_zero = times.front() == 0.0;
    if (leading_zero) times.erase(times.begin());
    const std::size_t n = times.size();

    std::vector<double> values(grid.size(), 0.0);
    if (n > 0) {
        std::vector<double> l = kernel_matrix(p, times);
        std::vector<double> work = l;
        if (!detail::cholesky_lower(work, n)) {
            double max_diag = 0.0;
            for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, l[i * n + i]);
            for (std::size_t i = 0; i < n; ++i) l[i * n + i] += 1e-12 * max_diag;
            work = l;
            if (!detail::cholesky_lower(work, n))
                throw std::runtime_error(
                    "sample_cholesky: kernel factorization failed after jitter (n=" + std::to_string(n) +
                    ", max diag=" + std::to_string(max_diag) + ")");
        }
        std::vector<double> z(n);
        for (double& v : z) v = rng.next_gaussian();
        const std::size_t off = leading_zero ? 1 : 0;
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j <= i; ++j) s += work[i * n + j] * z[j];
            values[i + off] = s;
        }
    }
    return ProcessPath(grid, std::move(values));
}

/// Euler-Maruyama sampler.  Requires 0 < t0 <= first positive grid time and
/// substeps >= 1; the value at t0 is an exact marginal draw.
inline ProcessPath sample_euler(ReinforcementP p, const Grid& grid, RngStream& rng, double t0,
                                std::size_t substeps) {
    if (!(t0 > 0.0)) throw std::domain_error("sample_euler: t0 must be > 0 (drift p/t is singular at 0)");
    if (substeps < 1) throw std::invalid_argument("sample_euler: substeps must be >= 1");
    const double pv = p.value();

    double first_positive = -1.0;
    for (double t : grid.times())
        if (t > 0.0) {
            first_positive = t;
            break;
        }
    if (first_positive > 0.0 && t0 > first_positive)
        throw std::invalid_argument("sample_euler: t0 must not exceed the first positive grid time");

    std::vector<double> values(grid.size(), 0.0);
    if (first_positive < 0.0) return ProcessPath(grid, std::move(values)); // grid == {0}

    const double t_end = grid.back();
    // refinement: log-spaced from t0 through t_end, plus the output times
    std::vector<double> mesh;
    mesh.reserve(substeps + grid.size() + 1);
    const double ratio = std::log(t_end / t0) / static_cast<double>(substeps);
    for (std::size_t k = 0; k <= substeps; ++k) mesh.push_back(t0 * std::exp(ratio * static_cast<double>(k)));
    mesh.back() = t_end;
    for (double t : grid.times())
        if (t >= t0) mesh.push_back(t);
    std::sort(mesh.begin(), mesh.end());
    mesh.erase(std::unique(mesh.begin(), mesh.end()), mesh.end());

    double x = std::sqrt(t0 / (1.0 - 2.0 * pv)) * rng.next_gaussian();
    std::size_t out = 0;
    while (out < grid.size() && grid.times()[out] < t0) ++out; // times below t0 other than 0 were excluded above
    auto record = [&](double t, double v) {
        while (out < grid.size() && grid.times()[out] == t) values[out++] = v;
    };
    record(mesh.front(), x);
    for (std::size_t k = 0; k + 1 < mesh.size(); ++k) {
        const double a = mesh[k], b = mesh[k + 1];
        const double h = b - a;
        x += (pv / a) * x * h + std::sqrt(h) * rng.next_gaussian();
        record(b, x);
    }
    return ProcessPath(grid, std::move(values));
}

/// Bridge from 0 to x over [0,1]: samples the free process on grid + {1}
/// and returns  B^(t) + t^{1-p} (x - B^(1)),  pinned exactly to x at t = 1.
inline ProcessPath bridge_sample(ReinforcementP p, const Grid& grid, double x, RngStream& rng) {
    if (!(grid.back() <= 1.0)) throw std::invalid_argument("bridge_sample: grid must lie in [0,1]");
    std::vector<double> times = grid.times();
    const bool append_one = times.back() < 1.0;
    if (append_one) times.push_back(1.0);
    const ProcessPath free_path = sample_exact(p, Grid(times), rng);
    const double end = free_path.values.back();

    std::vector<double> values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double t = grid.times()[i];
        if (t == 1.0)
            values[i] = x; // pinned by construction
        else
            values[i] = free_path.values[i] + std::pow(t, 1.0 - p.value()) * (x - end);
    }
    return ProcessPath(grid, std::move(values));
}

/// Ornstein-Uhlenbeck transform  U(u) = e^{-u/2} B^(e^u)  of a path sampled
/// on an exponential grid {e^u} with uniformly spaced u >= 0.  Returns the
/// path on the u-grid; stationary with variance 1/(1-2p) and lag covariance
/// e^{(p-1/2)|du|}/(1-2p).
inline ProcessPath ou_transform(const ProcessPath& path) {
    const auto& t = path.grid.times();
    if (t.front() < 1.0 - 1e-12)
        throw std::invalid_argument("ou_transform: grid must start at time >= 1 (u >= 0)");
    std::vector<double> u(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) u[i] = std::log(t[i]);
    if (u.size() >= 2) {
        const double du = u[1] - u[0];
        for (std::size_t i = 1; i < u.size(); ++i)
            if (std::abs((u[i] - u[i - 1]) - du) > 1e-9)
                throw std::invalid_argument("ou_transform: grid is not the exponential of a uniform grid");
    }
    u.front() = std::max(u.front(), 0.0); // log(1) can round to -0
    std::vector<double> values(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) values[i] = std::exp(-0.5 * u[i]) * path.values[i];
    return ProcessPath(Grid(std::move(u)), std::move(values));
}

/// Algebraic self-similarity checks of the kernel on a fixed triple set plus
/// random triples: scaling  c^{-2} K(c^2 s, c^2 t) = K(s,t)  and time
/// inversion  s t K(1/t, 1/s) = K(s,t),  each to 1e-12 relative error.
inline std::vector<StatReport> kernel_invariance_checks(ReinforcementP p, std::size_t random_triples = 100,
                                                        std::uint64_t seed = 0x5ca1e) {
    std::vector<std::array<double, 3>> triples = {
        {1.0, 2.0, 3.0}, {1.0, 2.0, 1.0}, {0.5, 4.0, 2.0}, {3.0, 7.0, 0.2}, {2.0, 2.0, 5.0},
    };
    RngStream rng(seed);
    for (std::size_t i = 0; i < random_triples; ++i)
        triples.push_back({0.01 + 10.0 * rng.next_double(), 0.01 + 10.0 * rng.next_double(),
                           0.05 + 5.0 * rng.next_double()});

    double scaling_err = 0.0, inversion_err = 0.0;
    for (const auto& [s, t, c] : triples) {
        const double k = covariance(p, s, t);
        scaling_err = std::max(scaling_err,
                               std::abs(covariance(p, c * c * s, c * c * t) / (c * c) - k) / std::abs(k));
        inversion_err = std::max(inversion_err,
                                 std::abs(s * t * covariance(p, 1.0 / t, 1.0 / s) - k) / std::abs(k));
    }
    std::vector<StatReport> reports;
    reports.push_back(band_report("kernel/scaling-invariance", scaling_err, 0.0, 1e-12));
    reports.push_back(band_report("kernel/time-inversion", inversion_err, 0.0, 1e-12));
    return reports;
}

} // namespace nrbm
