#include "fbsde/basis.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace fbsde {

namespace {

constexpr std::size_t kTableSize = BasisSet::kMaxDegree + 1;

constexpr std::array<std::array<std::uint64_t, kTableSize>, kTableSize> binomial_table() {
    std::array<std::array<std::uint64_t, kTableSize>, kTableSize> c{};
    for (std::size_t n = 0; n < kTableSize; ++n) {
        c[n][0] = 1;
        for (std::size_t j = 1; j <= n; ++j) {
            c[n][j] = c[n - 1][j - 1] + (j < n ? c[n - 1][j] : 0);
        }
    }
    return c;
}

// (l-1)!! for even l, i.e. E[G^l]; 29!! < 2^53 so every entry is exact in double.
constexpr std::array<std::uint64_t, kTableSize> even_moment_table() {
    std::array<std::uint64_t, kTableSize> m{};
    m[0] = 1;
    for (std::size_t l = 2; l < kTableSize; l += 2) {
        m[l] = m[l - 2] * (l - 1);
    }
    return m;
}

constexpr auto kBinomial = binomial_table();
constexpr auto kEvenMoment = even_moment_table();

std::vector<double> family_coefficients(BasisFamily family, std::size_t k) {
    std::vector<double> c(k * k, 0.0);
    auto row = [&](std::size_t j) { return c.data() + j * k; };
    switch (family) {
    case BasisFamily::monomial:
        for (std::size_t j = 0; j < k; ++j) row(j)[j] = 1.0;
        break;
    case BasisFamily::laguerre: {
        // L_n(s) = sum_j (-1)^j C(n, j) s^j / j!
        for (std::size_t n = 0; n < k; ++n) {
            double factorial = 1.0;
            for (std::size_t j = 0; j <= n; ++j) {
                if (j > 0) factorial *= static_cast<double>(j);
                const double sign = (j % 2 == 0) ? 1.0 : -1.0;
                row(n)[j] = sign * static_cast<double>(kBinomial[n][j]) / factorial;
            }
        }
        break;
    }
    case BasisFamily::hermite:
        // He_{n+1} = s He_n - n He_{n-1}
        row(0)[0] = 1.0;
        if (k > 1) row(1)[1] = 1.0;
        for (std::size_t n = 1; n + 1 < k; ++n) {
            for (std::size_t j = 0; j < k; ++j) {
                const double shifted = j > 0 ? row(n)[j - 1] : 0.0;
                row(n + 1)[j] = shifted - static_cast<double>(n) * row(n - 1)[j];
            }
        }
        break;
    }
    return c;
}

std::vector<AffineScaling> default_scalings(BasisFamily family, const FbsdeProblem& problem,
                                            const TimeGrid& grid) {
    std::vector<AffineScaling> scalings(grid.steps());
    const double x0 = problem.initial_state;
    for (std::size_t i = 0; i < grid.steps(); ++i) {
        switch (family) {
        case BasisFamily::monomial:
            break;
        case BasisFamily::laguerre:
            if (x0 != 0.0) scalings[i].scale = 1.0 / std::abs(x0);
            break;
        case BasisFamily::hermite: {
            const double inv_sd = 1.0 / std::sqrt(grid.time(i + 1));
            scalings[i] = {inv_sd, -x0 * inv_sd};
            break;
        }
        }
    }
    return scalings;
}

}  // namespace

std::string to_string(BasisFamily family) {
    switch (family) {
    case BasisFamily::laguerre: return "laguerre";
    case BasisFamily::hermite: return "hermite";
    case BasisFamily::monomial: return "monomial";
    }
    return "unknown";
}

BasisFamily parse_family(std::string_view name) {
    if (name == "laguerre") return BasisFamily::laguerre;
    if (name == "hermite") return BasisFamily::hermite;
    if (name == "monomial") return BasisFamily::monomial;
    throw std::invalid_argument("unknown basis family '" + std::string(name) + "'");
}

void gaussian_moments(double mean, double stddev, std::span<double> out) {
    if (out.size() > kTableSize) {
        throw std::invalid_argument("moment order exceeds supported degree");
    }
    const double var = stddev * stddev;
    for (std::size_t n = 0; n < out.size(); ++n) {
        // sum over even l of C(n, l) mean^(n-l) stddev^l (l-1)!!
        double total = 0.0;
        double var_power = 1.0;
        for (std::size_t l = 0; l <= n; l += 2) {
            total += static_cast<double>(kBinomial[n][l]) * static_cast<double>(kEvenMoment[l]) *
                     std::pow(mean, static_cast<double>(n - l)) * var_power;
            var_power *= var;
        }
        out[n] = total;
    }
}

BasisSet::BasisSet(BasisFamily family, std::size_t k, FbsdeProblem problem, TimeGrid grid)
    : BasisSet(family, k, problem, grid, default_scalings(family, problem, grid)) {}

BasisSet::BasisSet(BasisFamily family, std::size_t k, FbsdeProblem problem, TimeGrid grid,
                   std::vector<AffineScaling> scalings)
    : family_(family),
      k_(k),
      problem_(std::move(problem)),
      grid_(std::move(grid)),
      scalings_(std::move(scalings)) {
    if (k_ == 0) {
        throw std::invalid_argument("basis needs at least one function");
    }
    if (k_ - 1 > kMaxDegree) {
        throw std::invalid_argument("basis degree " + std::to_string(k_ - 1) +
                                    " exceeds the supported maximum of " +
                                    std::to_string(kMaxDegree));
    }
    if (scalings_.size() != grid_.steps()) {
        throw std::invalid_argument("one scaling per step index is required");
    }
    coefficients_ = family_coefficients(family_, k_);
}

std::span<const double> BasisSet::coefficients(std::size_t j) const {
    return std::span<const double>(coefficients_).subspan(j * k_, k_);
}

void BasisSet::check(std::size_t i, std::span<double> out) const {
    if (i >= steps()) {
        throw std::out_of_range("basis step index " + std::to_string(i) + " beyond grid");
    }
    if (out.size() != k_) {
        throw std::invalid_argument("output span must hold k entries");
    }
}

void BasisSet::eval(std::size_t i, double x, std::span<double> out) const {
    check(i, out);
    const double s = scalings_[i](x);
    out[0] = 1.0;
    if (k_ == 1) return;
    switch (family_) {
    case BasisFamily::monomial:
        for (std::size_t j = 1; j < k_; ++j) out[j] = out[j - 1] * s;
        break;
    case BasisFamily::laguerre:
        out[1] = 1.0 - s;
        for (std::size_t n = 1; n + 1 < k_; ++n) {
            const double nd = static_cast<double>(n);
            out[n + 1] = ((2.0 * nd + 1.0 - s) * out[n] - nd * out[n - 1]) / (nd + 1.0);
        }
        break;
    case BasisFamily::hermite:
        out[1] = s;
        for (std::size_t n = 1; n + 1 < k_; ++n) {
            out[n + 1] = s * out[n] - static_cast<double>(n) * out[n - 1];
        }
        break;
    }
}

void BasisSet::grad(std::size_t i, double x, std::span<double> out) const {
    check(i, out);
    const double a = scalings_[i].scale;
    std::array<double, kTableSize> values{};
    eval(i, x, std::span<double>(values).first(k_));
    out[0] = 0.0;
    switch (family_) {
    case BasisFamily::monomial:
        for (std::size_t j = 1; j < k_; ++j) {
            out[j] = static_cast<double>(j) * values[j - 1] * a;
        }
        break;
    case BasisFamily::laguerre: {
        // L_n' = -(L_0 + ... + L_{n-1})
        double running = 0.0;
        for (std::size_t j = 1; j < k_; ++j) {
            running += values[j - 1];
            out[j] = -running * a;
        }
        break;
    }
    case BasisFamily::hermite:
        for (std::size_t j = 1; j < k_; ++j) {
            out[j] = static_cast<double>(j) * values[j - 1] * a;
        }
        break;
    }
}

BasisSet::Transition BasisSet::transition(std::size_t i, double x) const {
    const double t = grid_.time(i);
    const double dt = grid_.dt(i);
    const double root_dt = std::sqrt(dt);
    const AffineScaling& sc = scalings_[i];
    return {
        sc(x + dt * problem_.drift(t, x)),
        sc.scale * problem_.diffusion(t, x) * root_dt,
        sc.scale * (1.0 + dt * problem_.drift_derivative(t, x)),
        sc.scale * problem_.diffusion_derivative(t, x) * root_dt,
    };
}

void BasisSet::cond_exp(std::size_t i, double x, std::span<double> out) const {
    check(i, out);
    const Transition tr = transition(i, x);
    std::array<double, kTableSize> moments{};
    gaussian_moments(tr.mean, tr.stddev, std::span<double>(moments).first(k_));
    for (std::size_t j = 0; j < k_; ++j) {
        const auto c = coefficients(j);
        double total = 0.0;
        for (std::size_t n = 0; n <= j; ++n) total += c[n] * moments[n];
        out[j] = total;
    }
}

void BasisSet::cond_exp_grad(std::size_t i, double x, std::span<double> out) const {
    check(i, out);
    const Transition tr = transition(i, x);
    std::array<double, kTableSize> moments{};
    gaussian_moments(tr.mean, tr.stddev, std::span<double>(moments).first(k_));
    // d m_n / d mean = n m_{n-1};  d m_n / d stddev = n (n-1) stddev m_{n-2}
    std::array<double, kTableSize> moment_dx{};
    for (std::size_t n = 1; n < k_; ++n) {
        const double nd = static_cast<double>(n);
        double d = nd * moments[n - 1] * tr.mean_dx;
        if (n >= 2) d += nd * (nd - 1.0) * tr.stddev * moments[n - 2] * tr.stddev_dx;
        moment_dx[n] = d;
    }
    for (std::size_t j = 0; j < k_; ++j) {
        const auto c = coefficients(j);
        double total = 0.0;
        for (std::size_t n = 1; n <= j; ++n) total += c[n] * moment_dx[n];
        out[j] = total;
    }
}

std::vector<double> BasisSet::eval(std::size_t i, double x) const {
    std::vector<double> out(k_);
    eval(i, x, out);
    return out;
}

std::vector<double> BasisSet::grad(std::size_t i, double x) const {
    std::vector<double> out(k_);
    grad(i, x, out);
    return out;
}

std::vector<double> BasisSet::cond_exp(std::size_t i, double x) const {
    std::vector<double> out(k_);
    cond_exp(i, x, out);
    return out;
}

std::vector<double> BasisSet::cond_exp_grad(std::size_t i, double x) const {
    std::vector<double> out(k_);
    cond_exp_grad(i, x, out);
    return out;
}

}  // namespace fbsde
