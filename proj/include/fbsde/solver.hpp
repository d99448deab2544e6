#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "fbsde/basis.hpp"
#include "fbsde/problem.hpp"
#include "fbsde/regress.hpp"
#include "fbsde/simulate.hpp"

namespace fbsde {

enum class Scheme { later, now };

std::string to_string(Scheme scheme);

/// Raised when a backward step produces a non-finite value.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, std::size_t step)
        : std::runtime_error(what + " at step " + std::to_string(step)), step_(step) {}
    std::size_t step() const { return step_; }

private:
    std::size_t step_;
};

struct StepDiagnostics {
    Coefficients coefficients;
    /// max over paths of |Y| produced by this step.
    double max_abs_y = 0.0;
    /// Regression-now only: Picard iterations used and the final gap between iterates.
    int picard_iterations = 0;
    double picard_gap = 0.0;
    bool picard_converged = true;
};

struct SolverResult {
    double y0 = 0.0;
    double z0 = 0.0;
    /// One entry per step, ordered by step index 0..N-1.
    std::vector<StepDiagnostics> per_step;
    Scheme scheme = Scheme::later;
    double runtime_ms = 0.0;

    double max_condition() const;
    bool picard_converged() const;
};

struct LaterOptions {
    double ridge = 0.0;
};

struct NowOptions {
    double ridge = 0.0;
    int picard_iters = 5;
    double picard_tol = 1e-10;
};

/// Regression-later backward sweep. For i = N-1 down to 0:
///   alpha = fit of Y_{i+1} on e^i(X_{i+1})
///   Z_{i+1} = alpha . grad e^i(X_{i+1}) sigma(t_{i+1}, X_{i+1})
///   beta  = fit of f(t_{i+1}, X_{i+1}, Y_{i+1}, Z_{i+1}) on e^i(X_{i+1})
///   Y_i   = (alpha + beta dt_i) . E[e^i(X_{i+1}) | X_i]
/// with Y_N = phi(X_N). Y_0 and Z_0 = sigma(0, x0) d/dx Y_0 come from the closed-form
/// conditional expectation at x0.
///
/// `grid`, `basis` and `paths` must share one partition (std::invalid_argument otherwise).
SolverResult solve_regress_later(const FbsdeProblem& problem, const TimeGrid& grid,
                                 const BasisSet& basis,
                                 const PathEnsemble& paths, const LaterOptions& options = {});

/// Implicit backward Euler scheme with regression-now conditional expectations:
///   Z_i = E[Y_{i+1} dW_i | X_i] / dt_i
///   Y_i = E[Y_{i+1} | X_i] + dt_i f(t_i, X_i, Y_i, Z_i)   (Picard iterations)
/// Both conditional expectations regress on the basis evaluated at X_i; at t_0 they are
/// sample means.
SolverResult solve_regress_now(const FbsdeProblem& problem, const TimeGrid& grid,
                               const BasisSet& basis,
                               const PathEnsemble& paths, const NowOptions& options = {});

}  // namespace fbsde
