#pragma once

// Estimators and hypothesis tests that turn Monte Carlo ensembles into
// pass/fail verdicts.
//
// Conventions: moment checks pass when |estimate - target| <= tolerance with
// the tolerance expressed in absolute units (builders expand "k standard
// errors" on the spot); distributional checks pass when the p-value exceeds
// its threshold.  Default thresholds: 4 standard errors two-sided, p > 0.01
// for Kolmogorov-Smirnov, chosen so a suite of a few dozen checks has a low
// false-alarm rate.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nrbm/math.hpp"
#include "nrbm/process.hpp"

namespace nrbm {

struct StatReport {
    std::string name;
    double estimate = 0.0;
    double std_error = 0.0;              // standard error, or the test statistic for p-value checks
    std::optional<double> p_value;
    double target = 0.0;                 // expected value, or p-value threshold
    double tolerance = 0.0;              // absolute tolerance (unused for p-value checks)
    bool pass = false;
    bool warn_only = false;              // qualitative checks that never fail a suite alone
};

inline StatReport moment_report(std::string name, double estimate, double se, double target,
                                double se_multiples = 4.0) {
    StatReport r;
    r.name = std::move(name);
    r.estimate = estimate;
    r.std_error = se;
    r.target = target;
    r.tolerance = se_multiples * se;
    r.pass = std::abs(estimate - target) <= r.tolerance;
    return r;
}

inline StatReport band_report(std::string name, double estimate, double lo, double hi) {
    StatReport r;
    r.name = std::move(name);
    r.estimate = estimate;
    r.target = 0.5 * (lo + hi);
    r.tolerance = 0.5 * (hi - lo);
    r.pass = std::abs(estimate - r.target) <= r.tolerance;
    return r;
}

inline StatReport pvalue_report(std::string name, double statistic, double p, double threshold = 0.01) {
    StatReport r;
    r.name = std::move(name);
    r.estimate = statistic;
    r.std_error = statistic;
    r.p_value = p;
    r.target = threshold;
    r.pass = p > threshold;
    return r;
}

struct MeanVar {
    double mean = 0.0;
    double variance = 0.0; // unbiased
    double se_mean = 0.0;
    double se_var = 0.0;   // plug-in fourth-central-moment formula
};

inline MeanVar mean_var_ci(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n < 2) throw std::invalid_argument("mean_var_ci: need at least 2 samples");
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    double m2 = 0.0, m4 = 0.0;
    for (double v : x) {
        const double d = v - mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    const double nd = static_cast<double>(n);
    MeanVar out;
    out.mean = mean;
    out.variance = m2 / (nd - 1.0);
    out.se_mean = std::sqrt(out.variance / nd);
    m2 /= nd;
    m4 /= nd;
    const double var_of_var = (m4 - (nd - 3.0) / (nd - 1.0) * m2 * m2) / nd;
    out.se_var = std::sqrt(std::max(var_of_var, 0.0));
    return out;
}

struct CovarianceEstimate {
    double covariance = 0.0; // unbiased
    double se = 0.0;         // delta-method plug-in
};

inline CovarianceEstimate empirical_covariance(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n)
        throw std::invalid_argument("empirical_covariance: need two equal samples of length >= 2");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    const double nd = static_cast<double>(n);
    mx /= nd;
    my /= nd;
    double cxy = 0.0, m22 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        cxy += dx * dy;
        m22 += dx * dx * dy * dy;
    }
    CovarianceEstimate out;
    out.covariance = cxy / (nd - 1.0);
    cxy /= nd;
    m22 /= nd;
    out.se = std::sqrt(std::max(m22 - cxy * cxy, 0.0) / nd);
    return out;
}

struct KsResult {
    double d = 0.0;
    double p_value = 0.0;
};

/// One-sample Kolmogorov-Smirnov against an arbitrary continuous CDF;
/// asymptotic p-value from the Kolmogorov series at sqrt(n) * D.
inline KsResult ks_test_cdf(std::vector<double> samples, const std::function<double(double)>& cdf) {
    const std::size_t n = samples.size();
    if (n < 30) throw std::invalid_argument("ks_test: need at least 30 samples");
    std::sort(samples.begin(), samples.end());
    const double nd = static_cast<double>(n);
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double f = cdf(samples[i]);
        d = std::max(d, f - static_cast<double>(i) / nd);
        d = std::max(d, static_cast<double>(i + 1) / nd - f);
    }
    return {d, kolmogorov_survival(std::sqrt(nd) * d)};
}

/// KS against the centered normal with standard deviation sigma.
inline KsResult ks_test_normal(std::vector<double> samples, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("ks_test_normal: sigma must be > 0");
    return ks_test_cdf(std::move(samples), [sigma](double x) { return normal_cdf(x / sigma); });
}

/// KS against the unit-rate exponential.
inline KsResult ks_test_exp1(std::vector<double> samples) {
    return ks_test_cdf(std::move(samples),
                       [](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-x); });
}

inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.size() < 30 || b.size() < 30)
        throw std::invalid_argument("ks_two_sample: need at least 30 samples per side");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= v) ++i;
        while (j < b.size() && b[j] <= v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    const double lambda = std::sqrt(na * nb / (na + nb)) * d;
    return {d, kolmogorov_survival(lambda)};
}

struct SlopeFit {
    double slope = 0.0;
    double se = 0.0;
};

/// Least-squares slope of log(variance) against log(n).  Per-point standard
/// errors of log V propagate into the slope error.
inline SlopeFit scaling_exponent_from_variances(const std::vector<double>& ns,
                                                const std::vector<double>& vars,
                                                const std::vector<double>& var_ses = {}) {
    const std::size_t k = ns.size();
    if (k < 3 || vars.size() != k)
        throw std::invalid_argument("scaling_exponent: need >= 3 checkpoints");
    std::vector<double> x(k), y(k);
    for (std::size_t i = 0; i < k; ++i) {
        if (!(vars[i] > 0.0)) throw std::invalid_argument("scaling_exponent: non-positive variance");
        x[i] = std::log(ns[i]);
        y[i] = std::log(vars[i]);
    }
    double xbar = 0.0;
    for (double v : x) xbar += v;
    xbar /= static_cast<double>(k);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        sxx += (x[i] - xbar) * (x[i] - xbar);
        sxy += (x[i] - xbar) * y[i];
    }
    SlopeFit fit;
    fit.slope = sxy / sxx;
    if (!var_ses.empty()) {
        if (var_ses.size() != k) throw std::invalid_argument("scaling_exponent: se length mismatch");
        double v = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            const double w = (x[i] - xbar) / sxx;
            const double sy = var_ses[i] / vars[i]; // se of log V
            v += w * w * sy * sy;
        }
        fit.se = std::sqrt(v);
    }
    return fit;
}

/// Slope fit from per-checkpoint ensembles of centered walk values.
inline SlopeFit scaling_exponent(const std::vector<double>& ns,
                                 const std::vector<std::vector<double>>& samples) {
    if (samples.size() != ns.size())
        throw std::invalid_argument("scaling_exponent: checkpoint/sample mismatch");
    std::vector<double> vars(ns.size()), ses(ns.size());
    for (std::size_t i = 0; i < ns.size(); ++i) {
        const auto mv = mean_var_ci(samples[i]);
        vars[i] = mv.variance;
        ses[i] = mv.se_var;
    }
    return scaling_exponent_from_variances(ns, vars, ses);
}

/// One L^2-Cauchy distance per checkpoint for the super-diffusive limit:
/// d_j = mean over replicas of |n^-p S(n) - (2n)^-p S(2n)|^2, computed from
/// per-replica values of the centered walk at n and 2n.
struct CauchyPoint {
    double n = 0.0;
    std::vector<double> s_n;   // centered walk at n, one entry per replica
    std::vector<double> s_2n;  // centered walk at 2n, same replica order
};

inline std::vector<double> cauchy_l2(double p, const std::vector<CauchyPoint>& points) {
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("cauchy_l2: p must lie in (0,1]");
    std::vector<double> d;
    d.reserve(points.size());
    for (const auto& pt : points) {
        if (pt.s_n.size() != pt.s_2n.size() || pt.s_n.empty())
            throw std::invalid_argument("cauchy_l2: mismatched replica arrays");
        const double an = std::pow(pt.n, -p);
        const double a2n = std::pow(2.0 * pt.n, -p);
        double acc = 0.0;
        for (std::size_t i = 0; i < pt.s_n.size(); ++i) {
            const double diff = an * pt.s_n[i] - a2n * pt.s_2n[i];
            acc += diff * diff;
        }
        d.push_back(acc / static_cast<double>(pt.s_n.size()));
    }
    return d;
}

/// sup over the grid of value / sqrt(2 t ln ln t); all grid times must
/// exceed e so the normalizer is real and positive.
inline double lil_statistic(const ProcessPath& path) {
    double stat = 0.0;
    for (std::size_t i = 0; i < path.grid.size(); ++i) {
        const double t = path.grid.times()[i];
        if (!(t > std::exp(1.0))) throw std::invalid_argument("lil_statistic: grid times must exceed e");
        stat = std::max(stat, path.values[i] / std::sqrt(2.0 * t * std::log(std::log(t))));
    }
    return stat;
}

/// Qualitative acceptance band for the iterated-logarithm statistic: the
/// limsup constant is (1-2p)^{-1/2}, approached only at log-log speed, so
/// the band is deliberately wide.
inline std::pair<double, double> lil_band(double p) {
    const double c = 1.0 / std::sqrt(1.0 - 2.0 * p);
    return {0.5 * c, 1.3 * c};
}

inline double median(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("median: empty");
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    double m = v[mid];
    if (v.size() % 2 == 0) {
        std::nth_element(v.begin(), v.begin() + mid - 1, v.end());
        m = 0.5 * (m + v[mid - 1]);
    }
    return m;
}

} // namespace nrbm
