#include "fbsde/oracle.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "fbsde/rng.hpp"
#include "fbsde/simulate.hpp"

namespace fbsde {

std::string to_string(ReferenceSource source) {
    switch (source) {
    case ReferenceSource::black_scholes_call: return "black_scholes_call";
    case ReferenceSource::black_scholes_put: return "black_scholes_put";
    case ReferenceSource::arctan_closed_form: return "arctan_closed_form";
    case ReferenceSource::nested_mc: return "nested_mc";
    }
    return "unknown";
}

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

ReferenceValue black_scholes(OptionKind kind, double spot, double strike, double rate, double vol,
                             double maturity) {
    if (!(spot > 0.0) || !(strike > 0.0) || !(vol > 0.0) || !(maturity > 0.0)) {
        throw std::invalid_argument("Black-Scholes inputs S0, K, sigma, T must be positive");
    }
    const double forward = spot * std::exp(rate * maturity);
    const double vol_sqrt_t = vol * std::sqrt(maturity);
    const double d_plus = (std::log(forward / strike) + 0.5 * vol * vol * maturity) / vol_sqrt_t;
    const double d_minus = d_plus - vol_sqrt_t;
    const double discount = std::exp(-rate * maturity);
    const double n_plus = normal_cdf(d_plus);

    const double call = discount * (forward * n_plus - strike * normal_cdf(d_minus));
    if (kind == OptionKind::call) {
        return {call, vol * n_plus * spot, ReferenceSource::black_scholes_call};
    }
    return {call - spot + strike * discount, vol * spot * (n_plus - 1.0),
            ReferenceSource::black_scholes_put};
}

ArctanPoint arctan_solution(double /*t*/, double w) {
    return {w * std::atan(w) - 0.5 * std::log1p(w * w), std::atan(w)};
}

namespace {

struct NodeValue {
    double y;
    double z;
};

class NestedTree {
public:
    NestedTree(const FbsdeProblem& problem, const TimeGrid& grid, std::size_t inner,
               std::uint64_t seed)
        : problem_(problem), grid_(grid), inner_(inner), seed_(seed) {}

    // Value at a node on level `level` with state x; `id` is unique within that level.
    NodeValue value(std::size_t level, double x, std::uint64_t id) const {
        const std::size_t n = grid_.steps();
        if (level == n) {
            return {problem_.terminal(x),
                    problem_.diffusion(grid_.time(n), x) * problem_.terminal_gradient(x)};
        }
        double sum_y = 0.0;
        double sum_z = 0.0;
        for (std::size_t j = 0; j < inner_; ++j) {
            const Child c = child(level, x, id, j);
            const NodeValue v = value(level + 1, c.x, id * inner_ + j);
            sum_y += v.y + grid_.dt(level) * problem_.driver(grid_.time(level + 1), c.x, v.y, v.z);
            sum_z += v.y * c.dw;
        }
        const double count = static_cast<double>(inner_);
        return {sum_y / count, sum_z / count / grid_.dt(level)};
    }

    struct Child {
        double x;
        double dw;
    };

    Child child(std::size_t level, double x, std::uint64_t parent, std::size_t index) const {
        const double t = grid_.time(level);
        const double dt = grid_.dt(level);
        const PhiloxCounter counter = {static_cast<std::uint32_t>(index),
                                       static_cast<std::uint32_t>(parent),
                                       static_cast<std::uint32_t>(parent >> 32),
                                       (static_cast<std::uint32_t>(Stream::nested_oracle) << 8) |
                                           static_cast<std::uint32_t>(level)};
        const double dw = std::sqrt(dt) * normal_draw(seed_, counter);
        return {x + dt * problem_.drift(t, x) + problem_.diffusion(t, x) * dw, dw};
    }

private:
    const FbsdeProblem& problem_;
    const TimeGrid& grid_;
    std::size_t inner_;
    std::uint64_t seed_;
};

}  // namespace

NestedMcEstimate nested_mc_y0(const FbsdeProblem& problem, const TimeGrid& grid, std::size_t outer,
                              std::size_t inner, std::uint64_t seed,
                              const NestedMcOptions& options) {
    if (outer < 2 || inner < 1) {
        throw std::invalid_argument("nested Monte Carlo needs outer >= 2 and inner >= 1");
    }
    double nodes = static_cast<double>(outer);
    for (std::size_t i = 1; i < grid.steps(); ++i) nodes *= static_cast<double>(inner);
    if (nodes > static_cast<double>(options.node_budget)) {
        throw std::invalid_argument("nested Monte Carlo tree exceeds the node budget");
    }

    const NestedTree tree(problem, grid, inner, seed);
    const double x0 = problem.initial_state;
    const double dt0 = grid.dt(0);
    const double t1 = grid.time(1);

    std::vector<double> samples(outer);
    parallel_chunks(outer, options.workers, [&](std::size_t first, std::size_t last) {
        for (std::size_t o = first; o < last; ++o) {
            const auto c = tree.child(0, x0, 0, o);
            const NodeValue v = tree.value(1, c.x, o);
            samples[o] = v.y + dt0 * problem.driver(t1, c.x, v.y, v.z);
        }
    });

    double mean = 0.0;
    for (double s : samples) mean += s;
    mean /= static_cast<double>(outer);
    double sq = 0.0;
    for (double s : samples) sq += (s - mean) * (s - mean);
    const double variance = sq / static_cast<double>(outer - 1);
    if (!std::isfinite(mean)) {
        throw std::domain_error("nested Monte Carlo produced a non-finite estimate");
    }
    return {mean, std::sqrt(variance / static_cast<double>(outer)),
            static_cast<std::size_t>(nodes)};
}

bool catalog_reference(const ProblemCatalogEntry& entry, ReferenceValue& out) {
    if (entry.name == "call" || entry.name == "put") {
        const auto& p = entry.parameters;
        out = black_scholes(entry.name == "call" ? OptionKind::call : OptionKind::put, p.at("S0"),
                            p.at("K"), p.at("r"), p.at("sigma"), p.at("T"));
        return true;
    }
    if (entry.name == "arctan") {
        const ArctanPoint a = arctan_solution(0.0, 0.0);
        out = {a.y, a.z, ReferenceSource::arctan_closed_form};
        return true;
    }
    return false;
}

}  // namespace fbsde
