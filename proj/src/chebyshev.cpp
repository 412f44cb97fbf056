#include "ulwaves/chebyshev.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ulwaves {

ChebyshevColumn chebyshev_column(int n)
{
    if (n < 2) throw std::invalid_argument("chebyshev_column needs at least 2 intervals");
    const double pi = std::numbers::pi;
    Eigen::VectorXd t(n + 1), c(n + 1);
    for (int j = 0; j <= n; ++j) {
        t(j) = std::cos(pi * j / n);
        c(j) = ((j == 0 || j == n) ? 2.0 : 1.0) * (j % 2 ? -1.0 : 1.0);
    }
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n + 1, n + 1);
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j)
            if (i != j) D(i, j) = c(i) / c(j) / (t(i) - t(j));
    // Negative-sum trick for the diagonal.
    for (int i = 0; i <= n; ++i) D(i, i) = -D.row(i).sum();
    ChebyshevColumn col;
    col.z = (t.array() - 1.0) / 2.0;
    col.D = 2.0 * D;
    col.D2 = col.D * col.D;
    return col;
}

Eigen::VectorXd clenshaw_curtis_weights(int n)
{
    const double pi = std::numbers::pi;
    Eigen::VectorXd w = Eigen::VectorXd::Zero(n + 1);
    for (int j = 0; j <= n; ++j) {
        const double th = pi * j / n;
        double s = 0.0;
        for (int k = 1; k <= n / 2; ++k) {
            const double b = (2 * k == n) ? 1.0 : 2.0;
            s += b * std::cos(2.0 * k * th) / (4.0 * k * k - 1.0);
        }
        const double cj = (j == 0 || j == n) ? 1.0 : 2.0;
        w(j) = cj / n * (1.0 - s);
    }
    return w / 2.0;
}

}  // namespace ulwaves
