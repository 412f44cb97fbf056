#pragma once

#include "ulwaves/dirichlet_neumann.hpp"
#include "ulwaves/grid.hpp"

namespace ulwaves {

struct SurfaceState {
    RealField eta;
    RealField psi;
    double t = 0.0;
};

struct PhysicsParams {
    double g = 1.0;
    double h = 1.0;
};

struct TraceFields {
    RealField B;
    VectorField V;
    RealField G_psi;
    RealField a;  // empty until taylor_coefficient fills it
};

struct Tendency {
    RealField deta;
    RealField dpsi;
    RealField G_psi;
};

class TaylorSignViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Owns the DNO solver for one grid; not shareable between threads.
class WaterWaveModel {
public:
    WaterWaveModel(const PeriodicGrid& grid, const PhysicsParams& phys, const DnoParams& dno);

    const PeriodicGrid& grid() const { return grid_; }
    const PhysicsParams& physics() const { return phys_; }
    DnoSolver& dno() { return dno_; }

    RealField G(const RealField& eta, const RealField& psi);
    // G and the potential are reused while (eta, psi) match the last solve exactly.
    const PlaneField& potential(const RealField& eta, const RealField& psi);

private:
    PeriodicGrid grid_;
    PhysicsParams phys_;
    DnoSolver dno_;
    RealField last_psi_;
    RealField last_g_;
};

TraceFields trace_velocities(WaterWaveModel& m, const SurfaceState& s, const RealField* G_psi = nullptr);
Tendency ww_rhs(WaterWaveModel& m, const SurfaceState& s);
// Fills tr.a and returns it; a = -(1/d_z rho) d_z P~ at z = 0.
const RealField& taylor_coefficient(WaterWaveModel& m, const SurfaceState& s, TraceFields& tr);
double hamiltonian(WaterWaveModel& m, const SurfaceState& s, const RealField* G_psi = nullptr);
double mass(const PeriodicGrid& grid, const SurfaceState& s);
// Sum over the d+1 physical directions of (Lambda_i Lambda_j Phi)^2 on every plane.
PlaneField hessian_square(LaplaceSolver& s, const PlaneField& phi);

struct ResidualReport {
    double B = 0.0;       // |(d_t + V.grad) B - (a - g)|_L2
    double V = 0.0;       // |(d_t + V.grad) V + a zeta|_L2
    double zeta = 0.0;    // |R|_L2 with R = (d_t + V.grad) zeta - G(eta)V - zeta G(eta)B
    double GV = 0.0;      // |G(eta)V|_L2 for scale
    VectorField R;
};

// Centered differences around `mid`; prev and next are dt away.
ResidualReport reformulated_residuals(WaterWaveModel& m, const SurfaceState& prev, const SurfaceState& mid,
                                      const SurfaceState& next);

}  // namespace ulwaves
