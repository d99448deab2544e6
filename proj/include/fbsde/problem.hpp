#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "fbsde/time_grid.hpp"

namespace fbsde {

using StateFn = std::function<double(double t, double x)>;
using DriverFn = std::function<double(double t, double x, double y, double z)>;
using TerminalFn = std::function<double(double x)>;

/// One decoupled FBSDE in one space dimension:
///   dX = b(t,X) dt + sigma(t,X) dW,            X_0 = x0
///   -dY = f(t,X,Y,Z) dt - Z dW,                Y_T = phi(X_T)
struct FbsdeProblem {
    std::string name;
    StateFn drift;
    StateFn diffusion;
    /// Optional spatial derivatives of drift and diffusion. Empty means a central
    /// finite difference is used instead.
    StateFn drift_dx;
    StateFn diffusion_dx;
    DriverFn driver;
    TerminalFn terminal;
    TerminalFn terminal_gradient;
    double initial_state = 0.0;
    double horizon = 1.0;
    /// Points where phi is not differentiable (excluded from gradient checks).
    std::vector<double> kinks;

    double drift_derivative(double t, double x) const;
    double diffusion_derivative(double t, double x) const;
};

/// Named entry of the shipped problem catalog: call, put, arctan or custom.
struct ProblemCatalogEntry {
    std::string name;
    std::map<std::string, double> parameters;
};

/// Builds the problem for a catalog entry.
///
/// call / put (Black-Scholes replication, f = -(r y + theta z), theta = (mu - r) / sigma)
///   require S0, K, r, mu, sigma, T.
/// arctan (Brownian forward, f = -1 / (2 (1 + tan^2 z))) accepts optional T (default 1).
/// custom (affine coefficients, affine driver, cubic terminal) accepts any of
///   x0, T, b0, b1, s0, s1, f0, fy, fz, c0, c1, c2, c3;
///   b = b0 + b1 x, sigma = s0 + s1 x, f = f0 + fy y + fz z, phi = c0 + c1 x + c2 x^2 + c3 x^3.
///   Defaults give the zero-driver linear Brownian problem (s0 = 1, c1 = 1, T = 1).
///
/// Throws std::invalid_argument for unknown names, unknown or missing parameters, and
/// parameters outside their domain.
FbsdeProblem make_problem(const ProblemCatalogEntry& entry);

/// Parameter set used in the shipped experiments (T=1, r=0.01, S0=100, K=100, mu=0.01,
/// sigma=0.02 for call and put). Empty for arctan and custom.
std::map<std::string, double> default_parameters(const std::string& name);

/// Parameter names accepted by a catalog entry.
std::vector<std::string> parameter_names(const std::string& name);

/// Largest |f(t_i, 0, 0, 0)| over the grid times; throws std::domain_error if any is
/// non-finite.
double driver_origin_bound(const FbsdeProblem& problem, const TimeGrid& grid);

/// Largest relative mismatch between terminal_gradient and a central difference of terminal
/// at the given points, skipping points within `kink_gap` of a declared kink.
double terminal_gradient_mismatch(const FbsdeProblem& problem, std::span<const double> points,
                                  double kink_gap = 1e-3);

/// Clamp applied to z before evaluating tan in the arctan driver.
inline constexpr double kTanClampMargin = 1e-9;

}  // namespace fbsde
