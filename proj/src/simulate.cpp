#include "fbsde/simulate.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>

#include "fbsde/rng.hpp"

namespace fbsde {

PathEnsemble::PathEnsemble(TimeGrid grid, std::size_t paths, std::uint64_t seed)
    : grid_(std::move(grid)),
      paths_(paths),
      seed_(seed),
      states_((grid_.steps() + 1) * paths),
      increments_(grid_.steps() * paths) {
    if (paths == 0) {
        throw std::invalid_argument("path count must be at least 1");
    }
}

std::span<const double> PathEnsemble::states_at(std::size_t i) const {
    if (i > steps()) {
        throw std::out_of_range("time index " + std::to_string(i) + " beyond grid");
    }
    return std::span<const double>(states_).subspan(i * paths_, paths_);
}

std::span<const double> PathEnsemble::increments_for(std::size_t i) const {
    if (i >= steps()) {
        throw std::out_of_range("increment index " + std::to_string(i) + " beyond grid");
    }
    return std::span<const double>(increments_).subspan(i * paths_, paths_);
}

void PathEnsemble::integrate(const FbsdeProblem& problem, std::size_t first, std::size_t last) {
    const std::size_t n = steps();
    for (std::size_t m = first; m < last; ++m) {
        states_[m] = problem.initial_state;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double t = grid_.time(i);
        const double dt = grid_.dt(i);
        const double* x = states_.data() + i * paths_;
        const double* dw = increments_.data() + i * paths_;
        double* next = states_.data() + (i + 1) * paths_;
        for (std::size_t m = first; m < last; ++m) {
            next[m] = x[m] + dt * problem.drift(t, x[m]) + problem.diffusion(t, x[m]) * dw[m];
        }
    }
}

PathEnsemble PathEnsemble::from_increments(const FbsdeProblem& problem, const TimeGrid& grid,
                                           std::size_t paths, std::vector<double> increments,
                                           std::uint64_t seed) {
    PathEnsemble ensemble(grid, paths, seed);
    if (increments.size() != ensemble.increments_.size()) {
        throw std::invalid_argument("increment array must hold N * M entries");
    }
    ensemble.increments_ = std::move(increments);
    ensemble.integrate(problem, 0, paths);
    return ensemble;
}

PathEnsemble simulate_paths(const FbsdeProblem& problem, const TimeGrid& grid, std::size_t paths,
                            std::uint64_t seed, std::size_t workers) {
    PathEnsemble ensemble(grid, paths, seed);
    const std::size_t n = grid.steps();
    parallel_chunks(paths, workers, [&](std::size_t first, std::size_t last) {
        for (std::size_t i = 0; i < n; ++i) {
            const double scale = std::sqrt(grid.dt(i));
            double* dw = ensemble.increments_.data() + i * paths;
            for (std::size_t m = first; m < last; ++m) {
                dw[m] = scale * path_normal(seed, Stream::forward_paths, m,
                                            static_cast<std::uint32_t>(i));
            }
        }
        ensemble.integrate(problem, first, last);
    });
    return ensemble;
}

std::size_t default_workers() {
    if (const char* env = std::getenv("FBSDE_WORKERS")) {
        char* end = nullptr;
        const unsigned long value = std::strtoul(env, &end, 10);
        if (end != env && *end == '\0' && value > 0) {
            return value;
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

bool diffusion_positive(const FbsdeProblem& problem, const PathEnsemble& ensemble) {
    for (std::size_t i = 0; i <= ensemble.steps(); ++i) {
        const double t = ensemble.grid().time(i);
        for (double x : ensemble.states_at(i)) {
            if (!(problem.diffusion(t, x) > 0.0)) return false;
        }
    }
    return true;
}

}  // namespace fbsde
