#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "fbsde/oracle.hpp"
#include "fbsde/solver.hpp"

using namespace fbsde;

namespace {

struct Setup {
    FbsdeProblem problem;
    TimeGrid grid;
    BasisSet basis;
    PathEnsemble paths;

    Setup(FbsdeProblem p, BasisFamily family, std::size_t k, std::size_t steps, std::size_t m,
          std::uint64_t seed)
        : problem(std::move(p)),
          grid(make_uniform_grid(problem.horizon, steps)),
          basis(family, k, problem, grid),
          paths(simulate_paths(problem, grid, m, seed)) {}
};

FbsdeProblem vanilla(const char* name) {
    return make_problem({name, default_parameters(name)});
}

}  // namespace

TEST_CASE("zero-driver linear problem is solved exactly by regression-later") {
    for (auto family : {BasisFamily::hermite, BasisFamily::monomial, BasisFamily::laguerre}) {
        INFO(to_string(family));
        Setup s(make_problem({"custom", {}}), family, 6, 10, 10000, 3);
        const auto r = solve_regress_later(s.problem, s.grid, s.basis, s.paths);
        CHECK(std::abs(r.y0) < 1e-10);
        CHECK(std::abs(r.z0 - 1.0) < 1e-10);
        CHECK(r.scheme == Scheme::later);
        REQUIRE(r.per_step.size() == 10);
        for (std::size_t i = 0; i < 10; ++i) CHECK(r.per_step[i].coefficients.step == i);
    }
}

TEST_CASE("zero-driver linear problem with regression-now") {
    const std::size_t m = 20000;
    Setup s(make_problem({"custom", {}}), BasisFamily::hermite, 6, 10, m, 4);
    const auto r = solve_regress_now(s.problem, s.grid, s.basis, s.paths);
    const double dt = s.grid.dt(0);
    CHECK(std::abs(r.y0) < 4.0 * std::sqrt(dt / m));
    CHECK(std::abs(r.z0 - 1.0) < 4.0 * std::sqrt(2.0 / m));
    CHECK(r.scheme == Scheme::now);
    CHECK(r.per_step.size() == 10);
    CHECK(r.picard_converged());
}

TEST_CASE("constant terminal value") {
    const double c = 2.5;
    const std::size_t m = 5000;
    Setup s(make_problem({"custom", {{"c0", c}, {"c1", 0.0}}}), BasisFamily::hermite, 4, 5, m, 5);
    const auto now = solve_regress_now(s.problem, s.grid, s.basis, s.paths);
    CHECK(now.y0 == doctest::Approx(c).epsilon(1e-12));
    CHECK(std::abs(now.z0) < 4.0 * c / std::sqrt(m * s.grid.dt(0)));
    const auto later = solve_regress_later(s.problem, s.grid, s.basis, s.paths);
    CHECK(later.y0 == doctest::Approx(c).epsilon(1e-12));
    CHECK(std::abs(later.z0) < 1e-10);
}

TEST_CASE("span exactness for an in-basis terminal function") {
    // phi(x) = x^2 with a monomial basis of degree 2: Y0 = E[X_T^2] = x0^2 + T, Z0 = 2 x0.
    for (double x0 : {0.0, 0.5}) {
        Setup s(make_problem({"custom", {{"x0", x0}, {"c1", 0.0}, {"c2", 1.0}}}),
                BasisFamily::monomial, 3, 8, 2000, 6);
        const auto r = solve_regress_later(s.problem, s.grid, s.basis, s.paths);
        CHECK(std::abs(r.y0 - (x0 * x0 + 1.0)) < 1e-9);
        CHECK(std::abs(r.z0 - 2.0 * x0) < 1e-9);
    }
}

TEST_CASE("terminal fit does not depend on the driver") {
    Setup s(vanilla("call"), BasisFamily::laguerre, 6, 4, 5000, 7);
    FbsdeProblem other = s.problem;
    other.driver = [](double, double x, double y, double z) { return 0.3 * y - 0.1 * z + 1e-3 * x; };
    const auto a = solve_regress_later(s.problem, s.grid, s.basis, s.paths);
    const auto b = solve_regress_later(other, s.grid, s.basis, s.paths);
    CHECK(a.per_step.back().coefficients.alpha == b.per_step.back().coefficients.alpha);
    CHECK(a.per_step.back().coefficients.beta != b.per_step.back().coefficients.beta);
}

TEST_CASE("results are bit-identical on repeat") {
    Setup s(make_problem({"arctan", {}}), BasisFamily::hermite, 6, 6, 4000, 8);
    const auto a = solve_regress_later(s.problem, s.grid, s.basis, s.paths);
    const auto b = solve_regress_later(s.problem, s.grid, s.basis, s.paths);
    CHECK(a.y0 == b.y0);
    CHECK(a.z0 == b.z0);
    const auto c = solve_regress_now(s.problem, s.grid, s.basis, s.paths);
    const auto d = solve_regress_now(s.problem, s.grid, s.basis, s.paths);
    CHECK(c.y0 == d.y0);
    CHECK(c.z0 == d.z0);
}

TEST_CASE("pricing problems at moderate path counts") {
    for (const char* name : {"call", "put"}) {
        INFO(name);
        Setup s(vanilla(name), BasisFamily::laguerre, 6, 10, 20000, 9);
        const auto ref = black_scholes(std::string(name) == "call" ? OptionKind::call : OptionKind::put,
                                       100, 100, 0.01, 0.02, 1);
        const auto later = solve_regress_later(s.problem, s.grid, s.basis, s.paths);
        const auto now = solve_regress_now(s.problem, s.grid, s.basis, s.paths);
        CHECK(std::abs(later.y0 - ref.y0_ref) < 0.05);
        CHECK(std::abs(later.z0 - ref.z0_ref) < 0.10);
        // scheme agreement on the shared ensemble
        CHECK(std::abs(later.y0 - now.y0) < 2.0 * (0.05 + 0.05));
        CHECK(later.max_condition() >= 1.0);
        for (const auto& step : later.per_step) {
            CHECK(step.max_abs_y > 0.0);
            CHECK(step.coefficients.alpha.size() == 6);
        }
    }
}

TEST_CASE("arctan problem at moderate path counts") {
    Setup s(make_problem({"arctan", {}}), BasisFamily::hermite, 6, 10, 20000, 10);
    const auto r = solve_regress_later(s.problem, s.grid, s.basis, s.paths);
    CHECK(std::abs(r.y0) < 0.02);
    CHECK(std::abs(r.z0) < 0.05);
    const auto now = solve_regress_now(s.problem, s.grid, s.basis, s.paths);
    CHECK(now.picard_converged());
}

TEST_CASE("non-finite values are reported with their step") {
    Setup s(make_problem({"custom", {}}), BasisFamily::hermite, 3, 4, 500, 11);
    FbsdeProblem bad = s.problem;
    bad.driver = [](double t, double, double, double) { return t > 0.6 && t < 0.9 ? NAN : 0.0; };
    try {
        solve_regress_later(bad, s.grid, s.basis, s.paths);
        FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
        CHECK(e.step() == 3);  // driver is NaN only at t_3 = 0.75
    }
    CHECK_THROWS_AS(solve_regress_now(bad, s.grid, s.basis, s.paths), NumericalError);
}

TEST_CASE("Picard cap is reported, not fatal") {
    Setup s(make_problem({"custom", {{"fy", 0.8}}}), BasisFamily::hermite, 3, 2, 500, 12);
    const auto capped = solve_regress_now(s.problem, s.grid, s.basis, s.paths, {0.0, 1, 1e-14});
    CHECK_FALSE(capped.picard_converged());
    CHECK(capped.per_step[0].picard_iterations == 1);
    CHECK(capped.per_step[0].picard_gap > 0.0);
    const auto full = solve_regress_now(s.problem, s.grid, s.basis, s.paths, {0.0, 60, 1e-12});
    CHECK(full.picard_converged());
    // linear driver: y = E + dt * 0.8 y has the fixed point E / (1 - 0.8 dt)
    CHECK(std::isfinite(full.y0));
}

TEST_CASE("inputs on different grids are rejected") {
    Setup s(make_problem({"custom", {}}), BasisFamily::hermite, 3, 4, 100, 13);
    const auto other = make_uniform_grid(1.0, 5);
    CHECK_THROWS_AS(solve_regress_later(s.problem, other, s.basis, s.paths), std::invalid_argument);
    CHECK_THROWS_AS(solve_regress_now(s.problem, other, s.basis, s.paths), std::invalid_argument);
    CHECK_THROWS_AS(solve_regress_now(s.problem, s.grid, s.basis, s.paths, {0.0, 0, 1e-10}),
                    std::invalid_argument);
}
