#include "fbsde/time_grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fbsde {

TimeGrid::TimeGrid(std::vector<double> times) : times_(std::move(times)) {
    if (times_.size() < 2) {
        throw std::invalid_argument("time grid needs at least two points");
    }
    if (times_.front() != 0.0) {
        throw std::invalid_argument("time grid must start at 0");
    }
    for (std::size_t i = 0; i + 1 < times_.size(); ++i) {
        if (!(times_[i + 1] > times_[i]) || !std::isfinite(times_[i + 1])) {
            throw std::invalid_argument("time grid must be finite and strictly increasing");
        }
    }
}

double TimeGrid::mesh() const {
    double widest = 0.0;
    for (std::size_t i = 0; i < steps(); ++i) {
        widest = std::max(widest, dt(i));
    }
    return widest;
}

TimeGrid make_uniform_grid(double horizon, std::size_t steps) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw std::invalid_argument("horizon must be positive");
    }
    if (steps == 0) {
        throw std::invalid_argument("step count must be at least 1");
    }
    std::vector<double> times(steps + 1);
    for (std::size_t i = 0; i < steps; ++i) {
        times[i] = static_cast<double>(i) * horizon / static_cast<double>(steps);
    }
    times[steps] = horizon;
    return TimeGrid(std::move(times));
}

}  // namespace fbsde
