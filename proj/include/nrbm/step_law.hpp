#pragma once

// Step distributions with exact moment metadata.
//
// A StepLaw bundles a sampler with closed-form mean/variance (and, where
// finite, a sup bound and fourth moment).  Downstream statistics always
// center by the exact mean, never by an estimated one, so the metadata is
// computed exactly: closed forms for rademacher/uniform/discrete, adaptive
// quadrature for the truncated gaussian.
//
// Degenerate (constant) laws are rejected at construction.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nrbm/math.hpp"
#include "nrbm/rng.hpp"

namespace nrbm {

namespace detail {

inline std::string fmt_num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", x);
    return buf;
}

} // namespace detail

class StepLaw {
public:
    enum class Kind { rademacher, gaussian, uniform, discrete, truncated };

    /// Uniform on {-1,+1}.
    static StepLaw rademacher() {
        StepLaw law(Kind::rademacher, "rademacher");
        law.mean_ = 0.0;
        law.variance_ = 1.0;
        law.sup_bound_ = 1.0;
        law.fourth_moment_ = 1.0;
        return law;
    }

    static StepLaw gaussian(double mu, double sigma) {
        if (!(sigma > 0.0) || !std::isfinite(mu) || !std::isfinite(sigma))
            throw std::invalid_argument("StepLaw::gaussian: requires finite mu and sigma > 0");
        StepLaw law(Kind::gaussian, "gaussian(" + detail::fmt_num(mu) + "," + detail::fmt_num(sigma) + ")");
        law.par0_ = mu;
        law.par1_ = sigma;
        law.mean_ = mu;
        law.variance_ = sigma * sigma;
        law.fourth_moment_ = mu * mu * mu * mu + 6.0 * mu * mu * sigma * sigma + 3.0 * sigma * sigma * sigma * sigma;
        return law;
    }

    static StepLaw uniform(double a, double b) {
        if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
            throw std::invalid_argument("StepLaw::uniform: requires finite a < b");
        StepLaw law(Kind::uniform, "uniform(" + detail::fmt_num(a) + "," + detail::fmt_num(b) + ")");
        law.par0_ = a;
        law.par1_ = b;
        law.mean_ = 0.5 * (a + b);
        law.variance_ = (b - a) * (b - a) / 12.0;
        law.sup_bound_ = std::max(std::abs(a), std::abs(b));
        law.fourth_moment_ = (std::pow(b, 5) - std::pow(a, 5)) / (5.0 * (b - a));
        return law;
    }

    static StepLaw discrete(std::vector<double> values, std::vector<double> probs) {
        if (values.empty() || values.size() != probs.size())
            throw std::invalid_argument("StepLaw::discrete: values/probs must be non-empty and equal length");
        double psum = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (!std::isfinite(values[i]) || !(probs[i] >= 0.0))
                throw std::invalid_argument("StepLaw::discrete: invalid atom");
            psum += probs[i];
        }
        if (std::abs(psum - 1.0) > 1e-12)
            throw std::invalid_argument("StepLaw::discrete: probabilities must sum to 1 (within 1e-12)");

        StepLaw law(Kind::discrete, "discrete(" + std::to_string(values.size()) + " atoms)");
        double m1 = 0.0, m2 = 0.0, m4 = 0.0, sup = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double v = values[i], q = probs[i];
            m1 += q * v;
            m2 += q * v * v;
            m4 += q * v * v * v * v;
            if (q > 0.0) sup = std::max(sup, std::abs(v));
        }
        law.mean_ = m1;
        law.variance_ = m2 - m1 * m1;
        law.sup_bound_ = sup;
        law.fourth_moment_ = m4;
        law.values_ = std::move(values);
        law.probs_ = std::move(probs);
        law.cum_.resize(law.probs_.size());
        double acc = 0.0;
        for (std::size_t i = 0; i < law.probs_.size(); ++i) {
            acc += law.probs_[i];
            law.cum_[i] = acc;
        }
        law.check_nondegenerate();
        return law;
    }

    Kind kind() const { return kind_; }
    const std::string& name() const { return name_; }
    double mean() const { return mean_; }
    double variance() const { return variance_; }
    std::optional<double> sup_bound() const { return sup_bound_; }
    std::optional<double> fourth_moment() const { return fourth_moment_; }

    /// One draw; advances only the caller's stream state.
    double sample(RngStream& rng) const {
        switch (kind_) {
        case Kind::rademacher:
            return rng.next_double() < 0.5 ? 1.0 : -1.0;
        case Kind::gaussian:
            return par0_ + par1_ * rng.next_gaussian();
        case Kind::uniform:
            return par0_ + (par1_ - par0_) * rng.next_double();
        case Kind::discrete: {
            const double u = rng.next_double();
            const auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
            const std::size_t idx = std::min<std::size_t>(it - cum_.begin(), values_.size() - 1);
            return values_[idx];
        }
        case Kind::truncated: {
            const double x = base_->sample(rng);
            return std::abs(x) <= trunc_b_ ? x - trunc_shift_ : -trunc_shift_;
        }
        }
        throw std::logic_error("StepLaw: bad kind");
    }

    /// E(X 1{|X| <= b}), exact per kind (quadrature for gaussian).
    double restricted_mean(double b) const { return restricted_moments(b)[1]; }

    /// Centered and truncated law: 1{|X|<=b} X - E(X 1{|X|<=b}).
    /// The result has exact mean 0 and sup bound b + |E(X 1{|X|<=b})|.
    StepLaw truncated(double b) const {
        if (!(b > 0.0)) throw std::invalid_argument("StepLaw::truncated: requires b > 0");
        if (kind_ == Kind::truncated)
            throw std::invalid_argument("StepLaw::truncated: truncating a truncated law is not supported");
        if (sup_bound_ && b >= *sup_bound_ && mean_ == 0.0)
            return *this; // indicator is identically 1 and the law is already centered
        const auto m = restricted_moments(b);
        const double c = m[1];
        const double var = m[2] - c * c;
        if (!(var > 1e-14 * std::max(1.0, variance_)))
            throw std::invalid_argument("StepLaw::truncated: truncated law is degenerate (variance 0) for " +
                                        name_ + " at b=" + detail::fmt_num(b));
        StepLaw law(Kind::truncated, "trunc(" + name_ + "," + detail::fmt_num(b) + ")");
        law.base_ = std::make_shared<StepLaw>(*this);
        law.trunc_b_ = b;
        law.trunc_shift_ = c;
        law.mean_ = 0.0;
        law.variance_ = var;
        law.sup_bound_ = b + std::abs(c);
        law.fourth_moment_ = m[4] - 4.0 * c * m[3] + 6.0 * c * c * m[2] - 3.0 * c * c * c * c;
        return law;
    }

    /// Same family shifted to mean zero.
    StepLaw centered() const {
        switch (kind_) {
        case Kind::rademacher:
        case Kind::truncated:
            return *this;
        case Kind::gaussian:
            return gaussian(0.0, par1_);
        case Kind::uniform:
            return uniform(par0_ - mean_, par1_ - mean_);
        case Kind::discrete: {
            std::vector<double> shifted = values_;
            for (double& v : shifted) v -= mean_;
            return discrete(std::move(shifted), probs_);
        }
        }
        throw std::logic_error("StepLaw: bad kind");
    }

private:
    StepLaw(Kind kind, std::string name) : kind_(kind), name_(std::move(name)) {}

    void check_nondegenerate() const {
        double scale = std::max(1.0, mean_ * mean_);
        if (!(variance_ > 1e-12 * scale))
            throw std::invalid_argument("StepLaw: degenerate (constant) law rejected: " + name_);
    }

    /// m[k] = E(X^k 1{|X| <= b}) for k = 0..4.
    std::array<double, 5> restricted_moments(double b) const {
        std::array<double, 5> m{};
        switch (kind_) {
        case Kind::rademacher:
            if (b >= 1.0) m = {1.0, 0.0, 1.0, 0.0, 1.0};
            return m;
        case Kind::uniform: {
            const double lo = std::max(par0_, -b);
            const double hi = std::min(par1_, b);
            if (lo >= hi) return m;
            const double w = par1_ - par0_;
            for (int k = 0; k <= 4; ++k)
                m[k] = (std::pow(hi, k + 1) - std::pow(lo, k + 1)) / ((k + 1) * w);
            return m;
        }
        case Kind::discrete:
            for (std::size_t i = 0; i < values_.size(); ++i) {
                const double v = values_[i];
                if (std::abs(v) <= b) {
                    double pw = probs_[i];
                    for (int k = 0; k <= 4; ++k) {
                        m[k] += pw;
                        pw *= v;
                    }
                }
            }
            return m;
        case Kind::gaussian: {
            const double mu = par0_, sigma = par1_;
            const double lo = std::max(-b, mu - 12.0 * sigma);
            const double hi = std::min(b, mu + 12.0 * sigma);
            if (lo >= hi) return m;
            const double scale = std::max(1.0, std::abs(mu) + 12.0 * sigma);
            double pw = 1.0;
            for (int k = 0; k <= 4; ++k) {
                m[k] = adaptive_simpson(
                    [&](double x) {
                        return std::pow(x, k) * normal_pdf((x - mu) / sigma) / sigma;
                    },
                    lo, hi, 1e-13 * std::max(1.0, pw));
                pw *= scale;
            }
            return m;
        }
        case Kind::truncated:
            throw std::logic_error("StepLaw: restricted moments of a truncated law");
        }
        throw std::logic_error("StepLaw: bad kind");
    }

    Kind kind_;
    std::string name_;
    double mean_ = 0.0;
    double variance_ = 0.0;
    std::optional<double> sup_bound_;
    std::optional<double> fourth_moment_;
    double par0_ = 0.0, par1_ = 0.0; // gaussian(mu,sigma) or uniform(a,b)
    std::vector<double> values_, probs_, cum_;
    std::shared_ptr<const StepLaw> base_;
    double trunc_b_ = 0.0, trunc_shift_ = 0.0;
};

/// Exact (mean, variance) of a law.
inline std::pair<double, double> moments(const StepLaw& law) {
    return {law.mean(), law.variance()};
}

/// The centered truncation map X -> 1{|X|<=b} X - E(X 1{|X|<=b}).
inline StepLaw truncate(const StepLaw& law, double b) {
    return law.truncated(b);
}

inline double sample(const StepLaw& law, RngStream& rng) {
    return law.sample(rng);
}

} // namespace nrbm
