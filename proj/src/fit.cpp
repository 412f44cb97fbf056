#include "ulwaves/fit.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace ulwaves {

LineFit line_fit(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("line_fit needs at least two (x, y) pairs");
    const Eigen::Index n = static_cast<Eigen::Index>(x.size());
    Eigen::MatrixXd A(n, 2);
    Eigen::VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        A(i, 0) = x[i];
        A(i, 1) = 1.0;
        b(i) = y[i];
    }
    const Eigen::Vector2d c = A.colPivHouseholderQr().solve(b);
    LineFit f;
    f.slope = c(0);
    f.intercept = c(1);
    f.residual = std::sqrt((A * c - b).squaredNorm() / static_cast<double>(n));
    return f;
}

}  // namespace ulwaves
