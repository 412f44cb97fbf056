#include "ulwaves/gmres.hpp"

#include <cmath>
#include <sstream>

namespace ulwaves {

GmresResult gmres(const LinearMap& A, const LinearMap& Minv, const Eigen::VectorXd& b, const GmresOptions& opt)
{
    const Eigen::Index n = b.size();
    GmresResult res;
    res.x = Eigen::VectorXd::Zero(n);
    res.final_residual = 0.0;
    const double bnorm = b.norm();
    if (bnorm == 0.0) {
        res.residual_history.push_back(0.0);
        return res;
    }
    const int m = opt.restart;
    Eigen::MatrixXd V(n, m + 1), Z(n, m);
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m + 1, m);
    Eigen::VectorXd cs(m), sn(m), g(m + 1), w(n), r(n), tmp(n);
    r = b;
    double beta = bnorm;
    res.residual_history.push_back(1.0);
    while (res.iterations < opt.max_iter) {
        V.col(0) = r / beta;
        g.setZero();
        g(0) = beta;
        H.setZero();
        int k = 0;
        for (; k < m && res.iterations < opt.max_iter; ++k) {
            Minv(V.col(k), tmp);
            Z.col(k) = tmp;
            A(tmp, w);
            for (int i = 0; i <= k; ++i) {
                H(i, k) = V.col(i).dot(w);
                w -= H(i, k) * V.col(i);
            }
            // Second Gram-Schmidt pass for orthogonality at tight tolerances.
            for (int i = 0; i <= k; ++i) {
                const double c = V.col(i).dot(w);
                H(i, k) += c;
                w -= c * V.col(i);
            }
            H(k + 1, k) = w.norm();
            const bool breakdown = !(H(k + 1, k) > 0.0);
            if (!breakdown) V.col(k + 1) = w / H(k + 1, k);
            for (int i = 0; i < k; ++i) {
                const double t = cs(i) * H(i, k) + sn(i) * H(i + 1, k);
                H(i + 1, k) = -sn(i) * H(i, k) + cs(i) * H(i + 1, k);
                H(i, k) = t;
            }
            const double d = std::hypot(H(k, k), H(k + 1, k));
            cs(k) = d > 0 ? H(k, k) / d : 1.0;
            sn(k) = d > 0 ? H(k + 1, k) / d : 0.0;
            H(k, k) = d;
            H(k + 1, k) = 0.0;
            g(k + 1) = -sn(k) * g(k);
            g(k) = cs(k) * g(k);
            ++res.iterations;
            const double rel = std::abs(g(k + 1)) / bnorm;
            res.residual_history.push_back(rel);
            if (rel <= opt.tol || breakdown) {
                ++k;
                break;
            }
        }
        // Rank-deficient triangles appear on breakdown with singular A.
        const Eigen::MatrixXd R = H.topLeftCorner(k, k);
        Eigen::VectorXd y = R.diagonal().cwiseAbs().minCoeff() > 1e-14 * R.diagonal().cwiseAbs().maxCoeff()
                                ? Eigen::VectorXd(R.triangularView<Eigen::Upper>().solve(g.head(k)))
                                : Eigen::VectorXd(R.completeOrthogonalDecomposition().solve(g.head(k)));
        res.x += Z.leftCols(k) * y;
        A(res.x, tmp);
        r = b - tmp;
        beta = r.norm();
        const double previous = res.final_residual;
        res.final_residual = beta / bnorm;
        res.residual_history.back() = res.final_residual;
        if (res.final_residual <= opt.tol) return res;
        if (previous > 0.0 && res.final_residual > 0.5 * previous) {
            res.stagnated = true;
            if (res.final_residual <= opt.stagnation_factor * opt.tol) return res;
            std::ostringstream os;
            os << "GMRES stagnated at relative residual " << res.final_residual << " (target " << opt.tol << ")";
            throw SolverError(os.str(), res.residual_history);
        }
    }
    if (res.final_residual <= opt.stagnation_factor * opt.tol) {
        res.stagnated = true;
        return res;
    }
    std::ostringstream os;
    os << "GMRES did not reach relative residual " << opt.tol << " in " << opt.max_iter << " iterations (last "
       << res.residual_history.back() << ")";
    throw SolverError(os.str(), res.residual_history);
}

}  // namespace ulwaves
