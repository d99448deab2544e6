#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fbsde/problem.hpp"
#include "fbsde/time_grid.hpp"

namespace fbsde {

enum class BasisFamily { laguerre, hermite, monomial };

std::string to_string(BasisFamily family);
/// Throws std::invalid_argument for unknown names.
BasisFamily parse_family(std::string_view name);

/// s = scale * x + shift, the state transform applied before the family polynomial.
struct AffineScaling {
    double scale = 1.0;
    double shift = 0.0;
    double operator()(double x) const { return scale * x + shift; }
};

/// k polynomial basis functions per step index. Index i carries the functions e^i that act on
/// the state at t_{i+1}; their one-step conditional expectation given X_{t_i} = x under the
/// Euler transition
///   X' = x + dt_i b(t_i, x) + sigma(t_i, x) sqrt(dt_i) G,   G ~ N(0, 1)
/// is exact, because s(X') is Gaussian and each basis function is a polynomial in s.
///
/// Component j (0-based) is the degree-j family polynomial of the scaled state:
///   monomial  s^j,                       s = x
///   laguerre  L_j(s) (orthonormal for e^{-s} on [0, inf)),  s = x / |x0| (x when x0 = 0)
///   hermite   He_j(s) (probabilists'),   s = (x - x0) / sqrt(t_{i+1})
class BasisSet {
public:
    static constexpr std::size_t kMaxDegree = 30;

    /// Throws std::invalid_argument for k == 0 or k - 1 > kMaxDegree.
    BasisSet(BasisFamily family, std::size_t k, FbsdeProblem problem, TimeGrid grid);
    /// Same, with one explicit scaling per step index.
    BasisSet(BasisFamily family, std::size_t k, FbsdeProblem problem, TimeGrid grid,
             std::vector<AffineScaling> scalings);

    BasisFamily family() const { return family_; }
    std::size_t size() const { return k_; }
    std::size_t steps() const { return grid_.steps(); }
    const TimeGrid& grid() const { return grid_; }
    const AffineScaling& scaling(std::size_t i) const { return scalings_.at(i); }
    /// Coefficients of component j in powers of s, lowest first.
    std::span<const double> coefficients(std::size_t j) const;

    void eval(std::size_t i, double x, std::span<double> out) const;
    void grad(std::size_t i, double x, std::span<double> out) const;
    void cond_exp(std::size_t i, double x, std::span<double> out) const;
    void cond_exp_grad(std::size_t i, double x, std::span<double> out) const;

    std::vector<double> eval(std::size_t i, double x) const;
    std::vector<double> grad(std::size_t i, double x) const;
    std::vector<double> cond_exp(std::size_t i, double x) const;
    std::vector<double> cond_exp_grad(std::size_t i, double x) const;

private:
    struct Transition {
        double mean;      // mean of s(X')
        double stddev;    // standard deviation of s(X')
        double mean_dx;   // d mean / dx
        double stddev_dx; // d stddev / dx
    };
    Transition transition(std::size_t i, double x) const;
    void check(std::size_t i, std::span<double> out) const;

    BasisFamily family_;
    std::size_t k_;
    FbsdeProblem problem_;
    TimeGrid grid_;
    std::vector<AffineScaling> scalings_;
    std::vector<double> coefficients_;  // k rows of k entries
};

/// E[(mean + stddev G)^n] for n = 0..out.size()-1, G standard normal, summed from the binomial
/// expansion with exact integer coefficients.
void gaussian_moments(double mean, double stddev, std::span<double> out);

}  // namespace fbsde
