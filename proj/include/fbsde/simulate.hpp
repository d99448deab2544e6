#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fbsde/problem.hpp"
#include "fbsde/time_grid.hpp"

namespace fbsde {

/// M Euler-Maruyama paths of the forward process and the Brownian increments that drove
/// them. Storage is step-major: all paths at one time index are contiguous.
class PathEnsemble {
public:
    /// Rebuilds states from explicit increments (step-major, N columns of M entries) by the
    /// Euler recursion.
    static PathEnsemble from_increments(const FbsdeProblem& problem, const TimeGrid& grid,
                                        std::size_t paths, std::vector<double> increments,
                                        std::uint64_t seed = 0);

    std::size_t paths() const { return paths_; }
    std::size_t steps() const { return grid_.steps(); }
    const TimeGrid& grid() const { return grid_; }
    std::uint64_t seed() const { return seed_; }

    /// X at t_i for all paths.
    std::span<const double> states_at(std::size_t i) const;
    /// Brownian increments over [t_i, t_{i+1}] for all paths; throws std::out_of_range for
    /// i >= N.
    std::span<const double> increments_for(std::size_t i) const;

    double state(std::size_t path, std::size_t i) const { return states_at(i)[path]; }
    double increment(std::size_t path, std::size_t i) const { return increments_for(i)[path]; }

private:
    PathEnsemble(TimeGrid grid, std::size_t paths, std::uint64_t seed);
    void integrate(const FbsdeProblem& problem, std::size_t first, std::size_t last);

    friend PathEnsemble simulate_paths(const FbsdeProblem&, const TimeGrid&, std::size_t,
                                       std::uint64_t, std::size_t);

    TimeGrid grid_;
    std::size_t paths_;
    std::uint64_t seed_;
    std::vector<double> states_;      // (N+1) * M
    std::vector<double> increments_;  // N * M
};

/// Simulates `paths` Euler paths. Increment (m, i) is a pure function of (seed, m, i), so the
/// output is bit-identical for any `workers` value.
PathEnsemble simulate_paths(const FbsdeProblem& problem, const TimeGrid& grid, std::size_t paths,
                            std::uint64_t seed, std::size_t workers = 0);

/// Worker count from FBSDE_WORKERS, falling back to the hardware concurrency.
std::size_t default_workers();

/// Runs body(first, last) over [0, count) split into contiguous chunks on up to `workers`
/// threads (0 = default_workers()).
template <typename Body>
void parallel_chunks(std::size_t count, std::size_t workers, Body&& body);

/// True if sigma(t_i, X_i) > 0 at every node of the ensemble.
bool diffusion_positive(const FbsdeProblem& problem, const PathEnsemble& ensemble);

}  // namespace fbsde

#include "fbsde/detail/parallel.hpp"
