#include "fbsde/problem.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fbsde {

namespace {

double central_difference(const StateFn& fn, double t, double x) {
    const double h = 1e-6 * std::max(1.0, std::abs(x));
    return (fn(t, x + h) - fn(t, x - h)) / (2.0 * h);
}

class ParameterReader {
public:
    ParameterReader(const ProblemCatalogEntry& entry, std::vector<std::string> allowed)
        : entry_(entry) {
        for (const auto& [key, value] : entry.parameters) {
            if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
                throw std::invalid_argument("problem '" + entry.name +
                                            "' does not take parameter '" + key + "'");
            }
            if (!std::isfinite(value)) {
                throw std::invalid_argument("parameter '" + key + "' is not finite");
            }
        }
    }

    double required(const std::string& key) const {
        auto it = entry_.parameters.find(key);
        if (it == entry_.parameters.end()) {
            throw std::invalid_argument("problem '" + entry_.name + "' is missing parameter '" +
                                        key + "'");
        }
        return it->second;
    }

    double optional(const std::string& key, double fallback) const {
        auto it = entry_.parameters.find(key);
        return it == entry_.parameters.end() ? fallback : it->second;
    }

private:
    const ProblemCatalogEntry& entry_;
};

double positive(const std::string& key, double value) {
    if (!(value > 0.0)) {
        throw std::invalid_argument("parameter '" + key + "' must be positive");
    }
    return value;
}

FbsdeProblem make_vanilla(const ProblemCatalogEntry& entry, bool is_call) {
    ParameterReader params(entry, parameter_names(entry.name));
    const double spot = positive("S0", params.required("S0"));
    const double strike = positive("K", params.required("K"));
    const double rate = params.required("r");
    const double mu = params.required("mu");
    const double vol = positive("sigma", params.required("sigma"));
    const double maturity = positive("T", params.required("T"));
    const double theta = (mu - rate) / vol;

    FbsdeProblem p;
    p.name = entry.name;
    p.drift = [mu](double, double x) { return mu * x; };
    p.diffusion = [vol](double, double x) { return vol * x; };
    p.drift_dx = [mu](double, double) { return mu; };
    p.diffusion_dx = [vol](double, double) { return vol; };
    p.driver = [rate, theta](double, double, double y, double z) {
        return -(rate * y + theta * z);
    };
    if (is_call) {
        p.terminal = [strike](double x) { return std::max(x - strike, 0.0); };
        p.terminal_gradient = [strike](double x) { return x > strike ? 1.0 : 0.0; };
    } else {
        p.terminal = [strike](double x) { return std::max(strike - x, 0.0); };
        p.terminal_gradient = [strike](double x) { return x < strike ? -1.0 : 0.0; };
    }
    p.initial_state = spot;
    p.horizon = maturity;
    p.kinks = {strike};
    return p;
}

FbsdeProblem make_arctan(const ProblemCatalogEntry& entry) {
    ParameterReader params(entry, parameter_names(entry.name));
    FbsdeProblem p;
    p.name = entry.name;
    p.drift = [](double, double) { return 0.0; };
    p.diffusion = [](double, double) { return 1.0; };
    p.drift_dx = [](double, double) { return 0.0; };
    p.diffusion_dx = [](double, double) { return 0.0; };
    p.driver = [](double, double, double, double z) {
        constexpr double limit = std::numbers::pi / 2.0 - kTanClampMargin;
        const double tz = std::tan(std::clamp(z, -limit, limit));
        return -1.0 / (2.0 * (1.0 + tz * tz));
    };
    p.terminal = [](double x) { return x * std::atan(x) - 0.5 * std::log1p(x * x); };
    p.terminal_gradient = [](double x) { return std::atan(x); };
    p.initial_state = 0.0;
    p.horizon = positive("T", params.optional("T", 1.0));
    return p;
}

FbsdeProblem make_custom(const ProblemCatalogEntry& entry) {
    ParameterReader params(entry, parameter_names(entry.name));
    const double b0 = params.optional("b0", 0.0);
    const double b1 = params.optional("b1", 0.0);
    const double s0 = params.optional("s0", 1.0);
    const double s1 = params.optional("s1", 0.0);
    const double f0 = params.optional("f0", 0.0);
    const double fy = params.optional("fy", 0.0);
    const double fz = params.optional("fz", 0.0);
    const double c0 = params.optional("c0", 0.0);
    const double c1 = params.optional("c1", 1.0);
    const double c2 = params.optional("c2", 0.0);
    const double c3 = params.optional("c3", 0.0);

    FbsdeProblem p;
    p.name = entry.name;
    p.drift = [b0, b1](double, double x) { return b0 + b1 * x; };
    p.diffusion = [s0, s1](double, double x) { return s0 + s1 * x; };
    p.drift_dx = [b1](double, double) { return b1; };
    p.diffusion_dx = [s1](double, double) { return s1; };
    p.driver = [f0, fy, fz](double, double, double y, double z) { return f0 + fy * y + fz * z; };
    p.terminal = [c0, c1, c2, c3](double x) { return c0 + x * (c1 + x * (c2 + x * c3)); };
    p.terminal_gradient = [c1, c2, c3](double x) { return c1 + x * (2.0 * c2 + x * 3.0 * c3); };
    p.initial_state = params.optional("x0", 0.0);
    p.horizon = positive("T", params.optional("T", 1.0));
    return p;
}

}  // namespace

double FbsdeProblem::drift_derivative(double t, double x) const {
    return drift_dx ? drift_dx(t, x) : central_difference(drift, t, x);
}

double FbsdeProblem::diffusion_derivative(double t, double x) const {
    return diffusion_dx ? diffusion_dx(t, x) : central_difference(diffusion, t, x);
}

std::vector<std::string> parameter_names(const std::string& name) {
    if (name == "call" || name == "put") {
        return {"S0", "K", "r", "mu", "sigma", "T"};
    }
    if (name == "arctan") {
        return {"T"};
    }
    if (name == "custom") {
        return {"x0", "T", "b0", "b1", "s0", "s1", "f0", "fy", "fz", "c0", "c1", "c2", "c3"};
    }
    throw std::invalid_argument("unknown problem '" + name + "'");
}

std::map<std::string, double> default_parameters(const std::string& name) {
    if (name == "call" || name == "put") {
        return {{"S0", 100.0}, {"K", 100.0}, {"r", 0.01},
                {"mu", 0.01},  {"sigma", 0.02}, {"T", 1.0}};
    }
    parameter_names(name);
    return {};
}

FbsdeProblem make_problem(const ProblemCatalogEntry& entry) {
    if (entry.name == "call") return make_vanilla(entry, true);
    if (entry.name == "put") return make_vanilla(entry, false);
    if (entry.name == "arctan") return make_arctan(entry);
    if (entry.name == "custom") return make_custom(entry);
    throw std::invalid_argument("unknown problem '" + entry.name + "'");
}

double driver_origin_bound(const FbsdeProblem& problem, const TimeGrid& grid) {
    double bound = 0.0;
    for (double t : grid.times()) {
        const double value = problem.driver(t, 0.0, 0.0, 0.0);
        if (!std::isfinite(value)) {
            throw std::domain_error("driver is not finite at the origin");
        }
        bound = std::max(bound, std::abs(value));
    }
    return bound;
}

double terminal_gradient_mismatch(const FbsdeProblem& problem, std::span<const double> points,
                                  double kink_gap) {
    double worst = 0.0;
    for (double x : points) {
        const bool near_kink = std::any_of(problem.kinks.begin(), problem.kinks.end(),
                                           [&](double k) { return std::abs(x - k) < kink_gap; });
        if (near_kink) continue;
        const double h = 1e-5 * std::max(1.0, std::abs(x));
        const double fd = (problem.terminal(x + h) - problem.terminal(x - h)) / (2.0 * h);
        const double exact = problem.terminal_gradient(x);
        const double scale = std::max(std::abs(exact), 1e-12);
        worst = std::max(worst, std::abs(fd - exact) / scale);
    }
    return worst;
}

}  // namespace fbsde
