#pragma once

#include "ulwaves/chebyshev.hpp"
#include "ulwaves/gmres.hpp"
#include "ulwaves/grid.hpp"
#include "ulwaves/paradiff.hpp"

#include <Eigen/Dense>

#include <memory>
#include <optional>
#include <stdexcept>

namespace ulwaves {

// Samples on the (x, z) tensor grid: row = x node, column j = Chebyshev node z_j (j = 0 is the surface).
using PlaneField = Eigen::MatrixXd;

enum class BottomMode {
    flat,       // fixed bottom y = -h: rho = (1+z) e^{delta z <D>} eta + z h
    following,  // rho = (1+z) e^{delta z <D>} eta - z (e^{-delta (1+z) <D>} eta - h), bottom at eta - h
};

struct DnoParams {
    double h = 1.0;
    double delta = 0.1;
    int zpoints = 32;
    BottomMode bottom = BottomMode::flat;
    double tol = 1e-10;
    int restart = 40;
    int max_iter = 400;
    int max_delta_halvings = 8;
};

class StraighteningFailure : public std::runtime_error {
public:
    StraighteningFailure(const std::string& what, double min_rho_z, double delta)
        : std::runtime_error(what), min_rho_z(min_rho_z), delta(delta)
    {
    }
    double min_rho_z;
    double delta;
};

struct StraightenedDomain {
    PeriodicGrid grid;
    int zpoints = 0;
    double h = 1.0;
    double delta = 0.1;
    BottomMode bottom = BottomMode::flat;
    ChebyshevColumn column;
    PlaneField rho, rho_z, rho_zz, lap_rho;
    std::vector<PlaneField> grad_rho, grad_rho_z;
    PlaneField alpha, gamma, g1;
    std::vector<PlaneField> beta;
};

// Lower bound demanded of d_z rho: h/2, or half the smallest depth h + min eta for the fixed flat bottom.
double straightening_floor(const RealField& eta, double h, BottomMode bottom);

// Throws StraighteningFailure when d_z rho is below straightening_floor somewhere.
StraightenedDomain straighten(const PeriodicGrid& grid, const RealField& eta, double h, double delta, int zpoints,
                              BottomMode bottom = BottomMode::flat);
// Halves delta until the straightening succeeds.
StraightenedDomain straighten(const PeriodicGrid& grid, const RealField& eta, const DnoParams& p);

struct SolveStats {
    int iterations = 0;
    std::vector<double> residual_history;
};

// Variable-coefficient solver on a fixed straightened domain.
class LaplaceSolver {
public:
    LaplaceSolver(StraightenedDomain dom, const DnoParams& params);

    const StraightenedDomain& domain() const { return dom_; }
    const PeriodicGrid& grid() const { return dom_.grid; }

    // (d_z^2 + alpha Lap + beta.grad d_z - gamma d_z) Phi = source in the interior, Phi = top at z = 0,
    // conormal flux g1 d_z Phi - g2.grad Phi = bottom_flux at z = -1 (zero when absent).
    PlaneField solve(const RealField& top, const PlaneField* source = nullptr, const RealField* bottom_flux = nullptr);
    const SolveStats& last_stats() const { return stats_; }

    PlaneField apply_operator(const PlaneField& phi);
    PlaneField dz(const PlaneField& phi) const;
    std::vector<PlaneField> grad_x(const PlaneField& phi);
    // g1 d_z f - g2.grad f on one plane.
    RealField conormal(const PlaneField& phi, int plane);
    // Lambda_1 f = d_z f / d_z rho and Lambda_2 f = grad f - (grad rho / d_z rho) d_z f, all planes.
    PlaneField lambda1(const PlaneField& f) const;
    std::vector<PlaneField> lambda2(const PlaneField& f);

private:
    void matvec(const Eigen::VectorXd& u, Eigen::VectorXd& out);
    void precondition(const Eigen::VectorXd& r, Eigen::VectorXd& out);
    void plane_spectral(const PlaneField& X, const PlaneField& Xz, PlaneField& lapX, std::vector<PlaneField>& gradX,
                        std::vector<PlaneField>& gradXz);

    StraightenedDomain dom_;
    DnoParams params_;
    FourierTransform ft_;
    int n_, nz_;
    std::vector<int> group_of_mode_;
    std::vector<Eigen::PartialPivLU<Eigen::MatrixXd>> lu_;
    std::vector<std::vector<Eigen::Index>> group_modes_;
    SolveStats stats_;
};

PlaneField solve_laplace(const StraightenedDomain& dom, const RealField& psi, const PlaneField* source = nullptr,
                         const DnoParams& params = {});

// G(eta) with the straightened domain and preconditioner cached per surface.
class DnoSolver {
public:
    DnoSolver(const PeriodicGrid& grid, const DnoParams& params);

    void set_surface(const RealField& eta);
    const RealField& surface() const { return eta_; }
    RealField apply(const RealField& psi);
    // Potential of the last apply().
    const PlaneField& potential() const { return phi_; }
    LaplaceSolver& laplace() { return *solver_; }
    const DnoParams& params() const { return params_; }
    const PeriodicGrid& grid() const { return grid_; }

private:
    PeriodicGrid grid_;
    DnoParams params_;
    RealField eta_;
    std::unique_ptr<LaplaceSolver> solver_;
    PlaneField phi_;
};

RealField dirichlet_neumann(const PeriodicGrid& grid, const RealField& eta, const RealField& psi, const DnoParams& params = {});

// lambda(x, xi) = sqrt((1+|grad eta|^2)|xi|^2 - (grad eta . xi)^2); domain_error at xi = 0.
RealField dno_principal_symbol(const PeriodicGrid& grid, const RealField& eta, const Frequency& xi);
ParaSymbol dno_symbol(const PeriodicGrid& grid, const RealField& eta);
RealField dno_remainder(DnoSolver& dno, const RealField& eta, const RealField& psi, const CutoffPair& cut = {});

}  // namespace ulwaves
