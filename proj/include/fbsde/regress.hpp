#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <vector>

namespace fbsde {

class BasisSet;

/// M x k matrix of basis values at one time slice; row m is e^step(X_m).
struct DesignMatrix {
    Eigen::MatrixXd entries;
    std::size_t step = 0;

    std::size_t rows() const { return static_cast<std::size_t>(entries.rows()); }
    std::size_t cols() const { return static_cast<std::size_t>(entries.cols()); }
};

/// Row m = basis.eval(step, states[m]).
DesignMatrix build_design(const BasisSet& basis, std::size_t step, std::span<const double> states);

struct Projection {
    std::vector<double> coefficients;
    /// sigma_max / sigma_min of the design (infinity when singular).
    double condition_estimate = 1.0;
    /// Number of singular values kept above the rank threshold.
    std::size_t rank = 0;
};

/// Least-squares fit design * c ~ target.
///
/// The design is reduced by Householder QR to a k x k triangle whose SVD gives the
/// minimal-norm solution; singular values at or below M * eps * sigma_max are dropped.
/// With ridge > 0 the objective becomes |design c - target|^2 / M + ridge |c|^2.
///
/// Throws std::invalid_argument on dimension mismatch, an empty design, or negative ridge.
Projection project(const DesignMatrix& design, std::span<const double> target, double ridge = 0.0);

/// Fitted coefficients of one backward step: alpha fits Y, beta fits the driver (or the
/// Z estimator for the regression-now scheme).
struct Coefficients {
    std::vector<double> alpha;
    std::vector<double> beta;
    double condition_estimate = 1.0;
    std::size_t step = 0;
};

}  // namespace fbsde
