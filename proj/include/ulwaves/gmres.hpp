#pragma once

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ulwaves {

class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, std::vector<double> history)
        : std::runtime_error(what), residual_history(std::move(history))
    {
    }
    std::vector<double> residual_history;
};

using LinearMap = std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>;

struct GmresOptions {
    double tol = 1e-10;  // relative to |b|
    int restart = 40;
    int max_iter = 400;
    // On stagnation (a restart cycle gaining less than 2x) a true residual within
    // stagnation_factor * tol is accepted; otherwise SolverError.
    double stagnation_factor = 10.0;
};

struct GmresResult {
    Eigen::VectorXd x;
    int iterations = 0;
    std::vector<double> residual_history;  // relative residuals
    double final_residual = 0.0;
    bool stagnated = false;
};

// Right-preconditioned restarted GMRES; the monitored residual is the true residual of A.
GmresResult gmres(const LinearMap& A, const LinearMap& Minv, const Eigen::VectorXd& b, const GmresOptions& opt);

}  // namespace ulwaves
