#pragma once

// Time grids and sampled continuous-time paths.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace nrbm {

/// A strictly increasing, finite, non-empty time grid with times[0] >= 0.
class Grid {
public:
    explicit Grid(std::vector<double> times) : times_(std::move(times)) {
        if (times_.empty()) throw std::invalid_argument("Grid: empty");
        if (!(times_.front() >= 0.0) || !std::isfinite(times_.front()))
            throw std::invalid_argument("Grid: times must be finite and start at >= 0");
        for (std::size_t i = 1; i < times_.size(); ++i)
            if (!(times_[i] > times_[i - 1]) || !std::isfinite(times_[i]))
                throw std::invalid_argument("Grid: times must be finite and strictly increasing");
    }

    static Grid uniform(double a, double b, std::size_t count) {
        if (count < 1 || !(a < b)) throw std::invalid_argument("Grid::uniform: bad range or count");
        std::vector<double> t(count);
        for (std::size_t i = 0; i < count; ++i)
            t[i] = count == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1);
        return Grid(std::move(t));
    }

    static Grid log_spaced(double a, double b, std::size_t count) {
        if (count < 1 || !(0.0 < a && a < b)) throw std::invalid_argument("Grid::log_spaced: bad range or count");
        const double la = std::log(a), lb = std::log(b);
        std::vector<double> t(count);
        for (std::size_t i = 0; i < count; ++i)
            t[i] = count == 1 ? a : std::exp(la + (lb - la) * static_cast<double>(i) / static_cast<double>(count - 1));
        return Grid(std::move(t));
    }

    const std::vector<double>& times() const { return times_; }
    std::size_t size() const { return times_.size(); }
    double front() const { return times_.front(); }
    double back() const { return times_.back(); }

private:
    std::vector<double> times_;
};

/// A path sampled on a grid.  Paths started at time 0 (Brownian-type
/// constructions) carry value 0 there.
struct ProcessPath {
    Grid grid;
    std::vector<double> values;

    ProcessPath(Grid g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
        if (values.size() != grid.size())
            throw std::invalid_argument("ProcessPath: grid/value length mismatch");
    }
};

} // namespace nrbm
