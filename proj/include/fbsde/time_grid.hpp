#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fbsde {

/// Partition 0 = t_0 < t_1 < ... < t_N = T of the time horizon.
class TimeGrid {
public:
    /// Throws std::invalid_argument unless `times` starts at 0 and is strictly increasing
    /// with at least two points.
    explicit TimeGrid(std::vector<double> times);

    std::size_t steps() const { return times_.size() - 1; }
    double horizon() const { return times_.back(); }
    double time(std::size_t i) const { return times_.at(i); }
    /// Width of step i, t_{i+1} - t_i.
    double dt(std::size_t i) const { return times_.at(i + 1) - times_.at(i); }
    /// Largest step width |pi|.
    double mesh() const;
    std::span<const double> times() const { return times_; }

private:
    std::vector<double> times_;
};

/// times[i] = i * T / N.
TimeGrid make_uniform_grid(double horizon, std::size_t steps);

}  // namespace fbsde
