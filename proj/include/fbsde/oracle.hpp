#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "fbsde/problem.hpp"
#include "fbsde/time_grid.hpp"

namespace fbsde {

enum class ReferenceSource { black_scholes_call, black_scholes_put, arctan_closed_form, nested_mc };

std::string to_string(ReferenceSource source);

struct ReferenceValue {
    double y0_ref = 0.0;
    double z0_ref = 0.0;
    ReferenceSource source = ReferenceSource::black_scholes_call;
};

enum class OptionKind { call, put };

/// Standard normal CDF, 0.5 erfc(-x / sqrt 2).
double normal_cdf(double x);

/// Black-Scholes price (Y0) and sigma * S0 * delta (Z0). The put follows from parity.
/// Throws std::invalid_argument unless S0, K, sigma and T are positive.
ReferenceValue black_scholes(OptionKind kind, double spot, double strike, double rate, double vol,
                             double maturity);

struct ArctanPoint {
    double y;
    double z;
};

/// Closed-form solution of the arctan BSDE: y = w atan(w) - ln(1 + w^2) / 2, z = atan(w).
/// Time-independent.
ArctanPoint arctan_solution(double t, double w);

struct NestedMcEstimate {
    double y0 = 0.0;
    double standard_error = 0.0;
    std::size_t nodes = 0;
};

struct NestedMcOptions {
    /// Largest permitted outer * inner^(N-1).
    std::size_t node_budget = 100'000'000;
    std::size_t workers = 0;
};

/// Brute-force Y0 for the backward Euler recursion with every conditional expectation
/// replaced by an inner re-simulation:
///   Y_i = mean over children of [Y_{i+1} + dt_i f(t_{i+1}, X_{i+1}, Y_{i+1}, Z_{i+1})]
///   Z_i = mean over children of [Y_{i+1} dW_i] / dt_i
/// with Y_N = phi(X_N), Z_N = sigma(T, X_N) phi'(X_N). The root has `outer` children and
/// every deeper node `inner`. Throws std::invalid_argument when the tree exceeds the budget.
NestedMcEstimate nested_mc_y0(const FbsdeProblem& problem, const TimeGrid& grid, std::size_t outer,
                              std::size_t inner, std::uint64_t seed,
                              const NestedMcOptions& options = {});

/// Reference for a catalog problem (call, put, arctan); returns false for custom problems.
bool catalog_reference(const ProblemCatalogEntry& entry, ReferenceValue& out);

}  // namespace fbsde
