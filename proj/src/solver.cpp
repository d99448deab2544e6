#include "fbsde/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace fbsde {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

double dot(std::span<const double> a, std::span<const double> b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

void require_same_grid(const TimeGrid& grid, const BasisSet& basis, const PathEnsemble& paths) {
    const auto g = grid.times();
    const auto same = [&](std::span<const double> other) {
        return std::equal(g.begin(), g.end(), other.begin(), other.end());
    };
    if (!same(basis.grid().times()) || !same(paths.grid().times())) {
        throw std::invalid_argument("grid, basis and paths must share one time partition");
    }
}

void require_finite(std::span<const double> values, const char* what, std::size_t step) {
    for (double v : values) {
        if (!std::isfinite(v)) throw NumericalError(std::string("non-finite ") + what, step);
    }
}

double max_abs(std::span<const double> values) {
    double out = 0.0;
    for (double v : values) out = std::max(out, std::abs(v));
    return out;
}

std::vector<double> terminal_values(const FbsdeProblem& problem, const PathEnsemble& paths) {
    const auto xs = paths.states_at(paths.steps());
    std::vector<double> y(xs.size());
    std::transform(xs.begin(), xs.end(), y.begin(), problem.terminal);
    require_finite(y, "terminal value", paths.steps());
    return y;
}

}  // namespace

std::string to_string(Scheme scheme) {
    return scheme == Scheme::later ? "later" : "now";
}

double SolverResult::max_condition() const {
    double worst = 1.0;
    for (const auto& s : per_step) worst = std::max(worst, s.coefficients.condition_estimate);
    return worst;
}

bool SolverResult::picard_converged() const {
    return std::all_of(per_step.begin(), per_step.end(),
                       [](const StepDiagnostics& s) { return s.picard_converged; });
}

SolverResult solve_regress_later(const FbsdeProblem& problem, const TimeGrid& grid,
                                 const BasisSet& basis, const PathEnsemble& paths,
                                 const LaterOptions& options) {
    require_same_grid(grid, basis, paths);
    const auto start = Clock::now();
    const std::size_t n_steps = grid.steps();
    const std::size_t n_paths = paths.paths();
    const std::size_t k = basis.size();

    SolverResult result;
    result.scheme = Scheme::later;
    result.per_step.resize(n_steps);

    std::vector<double> y = terminal_values(problem, paths);
    std::vector<double> z(n_paths);
    std::vector<double> driver(n_paths);
    std::vector<double> row(k);
    std::vector<double> gamma(k);

    for (std::size_t step = n_steps; step-- > 0;) {
        const double t_next = grid.time(step + 1);
        const double dt = grid.dt(step);
        const auto x_next = paths.states_at(step + 1);

        const DesignMatrix design = build_design(basis, step, x_next);
        const Projection fit_y = project(design, y, options.ridge);
        require_finite(fit_y.coefficients, "alpha", step);

        for (std::size_t m = 0; m < n_paths; ++m) {
            const double x = x_next[m];
            basis.grad(step, x, row);
            z[m] = dot(fit_y.coefficients, row) * problem.diffusion(t_next, x);
            driver[m] = problem.driver(t_next, x, y[m], z[m]);
        }
        require_finite(z, "Z", step + 1);
        require_finite(driver, "driver value", step + 1);

        const Projection fit_f = project(design, driver, options.ridge);
        require_finite(fit_f.coefficients, "beta", step);

        for (std::size_t j = 0; j < k; ++j) {
            gamma[j] = fit_y.coefficients[j] + fit_f.coefficients[j] * dt;
        }

        StepDiagnostics& diag = result.per_step[step];
        diag.coefficients = {fit_y.coefficients, fit_f.coefficients,
                             std::max(fit_y.condition_estimate, fit_f.condition_estimate), step};

        if (step > 0) {
            const auto x_now = paths.states_at(step);
            for (std::size_t m = 0; m < n_paths; ++m) {
                basis.cond_exp(step, x_now[m], row);
                y[m] = dot(gamma, row);
            }
            require_finite(y, "Y", step);
            diag.max_abs_y = max_abs(y);
        } else {
            const double x0 = problem.initial_state;
            basis.cond_exp(0, x0, row);
            result.y0 = dot(gamma, row);
            basis.cond_exp_grad(0, x0, row);
            result.z0 = problem.diffusion(grid.time(0), x0) * dot(gamma, row);
            if (!std::isfinite(result.y0) || !std::isfinite(result.z0)) {
                throw NumericalError("non-finite (Y0, Z0)", 0);
            }
            diag.max_abs_y = std::abs(result.y0);
        }
    }

    result.runtime_ms = elapsed_ms(start);
    return result;
}

SolverResult solve_regress_now(const FbsdeProblem& problem, const TimeGrid& grid,
                               const BasisSet& basis, const PathEnsemble& paths,
                               const NowOptions& options) {
    require_same_grid(grid, basis, paths);
    if (options.picard_iters < 1) {
        throw std::invalid_argument("picard_iters must be at least 1");
    }
    const auto start = Clock::now();
    const std::size_t n_steps = grid.steps();
    const std::size_t n_paths = paths.paths();
    const std::size_t k = basis.size();

    SolverResult result;
    result.scheme = Scheme::now;
    result.per_step.resize(n_steps);

    std::vector<double> y = terminal_values(problem, paths);
    std::vector<double> weighted(n_paths);
    std::vector<double> mean_y(n_paths);
    std::vector<double> z(n_paths);

    for (std::size_t step = n_steps; step-- > 0;) {
        const double t = grid.time(step);
        const double dt = grid.dt(step);
        const auto x = paths.states_at(step);
        const auto dw = paths.increments_for(step);
        for (std::size_t m = 0; m < n_paths; ++m) weighted[m] = y[m] * dw[m];

        StepDiagnostics& diag = result.per_step[step];
        diag.coefficients.step = step;
        if (step > 0) {
            // Basis index step-1 acts on the state at t_step.
            const DesignMatrix design = build_design(basis, step - 1, x);
            const Projection fit_y = project(design, y, options.ridge);
            const Projection fit_z = project(design, weighted, options.ridge);
            const Eigen::Map<const Eigen::VectorXd> a(fit_y.coefficients.data(),
                                                      static_cast<Eigen::Index>(k));
            const Eigen::Map<const Eigen::VectorXd> c(fit_z.coefficients.data(),
                                                      static_cast<Eigen::Index>(k));
            Eigen::Map<Eigen::VectorXd>(mean_y.data(), static_cast<Eigen::Index>(n_paths)) =
                design.entries * a;
            Eigen::Map<Eigen::VectorXd>(z.data(), static_cast<Eigen::Index>(n_paths)) =
                design.entries * c / dt;
            std::vector<double> beta(fit_z.coefficients);
            for (double& b : beta) b /= dt;
            diag.coefficients.alpha = fit_y.coefficients;
            diag.coefficients.beta = std::move(beta);
            diag.coefficients.condition_estimate =
                std::max(fit_y.condition_estimate, fit_z.condition_estimate);
        } else {
            const double inv_m = 1.0 / static_cast<double>(n_paths);
            const double ey = std::accumulate(y.begin(), y.end(), 0.0) * inv_m;
            const double ez = std::accumulate(weighted.begin(), weighted.end(), 0.0) * inv_m / dt;
            std::fill(mean_y.begin(), mean_y.end(), ey);
            std::fill(z.begin(), z.end(), ez);
            diag.coefficients.alpha.assign(k, 0.0);
            diag.coefficients.beta.assign(k, 0.0);
            diag.coefficients.alpha[0] = ey;
            diag.coefficients.beta[0] = ez;
        }
        require_finite(mean_y, "conditional mean of Y", step);
        require_finite(z, "Z", step);

        // Implicit step: y = E[Y_{i+1} | X_i] + dt f(t_i, X_i, y, Z_i).
        const std::size_t active = step > 0 ? n_paths : 1;
        std::vector<double> next(mean_y.begin(), mean_y.begin() + static_cast<long>(active));
        double gap = 0.0;
        int iterations = 0;
        while (iterations < options.picard_iters) {
            ++iterations;
            gap = 0.0;
            for (std::size_t m = 0; m < active; ++m) {
                const double updated = mean_y[m] + dt * problem.driver(t, x[m], next[m], z[m]);
                gap = std::max(gap, std::abs(updated - next[m]));
                next[m] = updated;
            }
            if (gap < options.picard_tol) break;
        }
        require_finite(next, "Y", step);
        diag.picard_iterations = iterations;
        diag.picard_gap = gap;
        diag.picard_converged = gap < options.picard_tol;
        diag.max_abs_y = max_abs(next);

        if (step > 0) {
            y = std::move(next);
        } else {
            result.y0 = next[0];
            result.z0 = z[0];
        }
    }

    result.runtime_ms = elapsed_ms(start);
    return result;
}

}  // namespace fbsde
