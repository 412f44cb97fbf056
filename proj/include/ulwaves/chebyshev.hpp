#pragma once

#include <Eigen/Dense>

namespace ulwaves {

// Chebyshev-Lobatto collocation on z in [-1, 0]; node 0 is z = 0, node n is z = -1.
struct ChebyshevColumn {
    Eigen::VectorXd z;
    Eigen::MatrixXd D;   // d/dz
    Eigen::MatrixXd D2;  // d^2/dz^2
};

ChebyshevColumn chebyshev_column(int n);

// Clenshaw-Curtis weights on [-1, 0] for the same nodes.
Eigen::VectorXd clenshaw_curtis_weights(int n);

}  // namespace ulwaves
