#include "fbsde/regress.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "fbsde/basis.hpp"

namespace fbsde {

DesignMatrix build_design(const BasisSet& basis, std::size_t step, std::span<const double> states) {
    const auto k = static_cast<Eigen::Index>(basis.size());
    DesignMatrix design{Eigen::MatrixXd(static_cast<Eigen::Index>(states.size()), k), step};
    std::vector<double> row(basis.size());
    for (std::size_t m = 0; m < states.size(); ++m) {
        basis.eval(step, states[m], row);
        for (Eigen::Index j = 0; j < k; ++j) {
            design.entries(static_cast<Eigen::Index>(m), j) = row[static_cast<std::size_t>(j)];
        }
    }
    return design;
}

Projection project(const DesignMatrix& design, std::span<const double> target, double ridge) {
    const Eigen::Index rows = design.entries.rows();
    const Eigen::Index cols = design.entries.cols();
    if (rows == 0 || cols == 0) {
        throw std::invalid_argument("design matrix is empty");
    }
    if (static_cast<std::size_t>(rows) != target.size()) {
        throw std::invalid_argument("target length does not match design rows");
    }
    if (!(ridge >= 0.0)) {
        throw std::invalid_argument("ridge must be non-negative");
    }

    const Eigen::Map<const Eigen::VectorXd> b(target.data(), rows);

    // Reduce to a square (or short) triangle so the SVD only sees k columns.
    Eigen::MatrixXd reduced;
    Eigen::VectorXd rhs;
    if (rows > cols) {
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(design.entries);
        reduced = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
        rhs = (qr.householderQ().transpose() * b).head(cols);
    } else {
        reduced = design.entries;
        rhs = b;
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(reduced, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double sigma_max = sv.size() > 0 ? sv(0) : 0.0;
    const double threshold = static_cast<double>(rows) * std::numeric_limits<double>::epsilon() *
                             sigma_max;
    const double shift = ridge * static_cast<double>(rows);

    Eigen::VectorXd projected = svd.matrixU().transpose() * rhs;
    Projection out;
    for (Eigen::Index j = 0; j < sv.size(); ++j) {
        if (sv(j) > threshold) {
            projected(j) *= sv(j) / (sv(j) * sv(j) + shift);
            ++out.rank;
        } else {
            projected(j) = 0.0;
        }
    }
    const Eigen::VectorXd c = svd.matrixV() * projected;
    out.coefficients.assign(c.data(), c.data() + c.size());

    const double sigma_min = sv.size() == cols ? sv(sv.size() - 1) : 0.0;
    out.condition_estimate = sigma_min > 0.0 ? std::max(1.0, sigma_max / sigma_min)
                                             : std::numeric_limits<double>::infinity();
    return out;
}

}  // namespace fbsde
