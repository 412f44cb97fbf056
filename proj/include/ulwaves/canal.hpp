#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ulwaves/timestepper.hpp"

namespace ulwaves {

enum class Parity { even, odd };

// Canal (axis 0 reflected) or basin (both axes reflected) embedded in a doubled torus.
// Torus nodes x_i = i dx; wall nodes are i = 0 and i = n/2 on each reflected axis, and the
// canal-sampled arrays keep indices 0..n/2 there (flat index i0 + m0 i1 as on the torus).
class CanalDomain {
public:
    explicit CanalDomain(const PeriodicGrid& torus, bool basin = false);

    const PeriodicGrid& torus() const { return torus_; }
    bool basin() const { return basin_; }
    bool reflected(int axis) const { return axis == 0 || (basin_ && axis == 1); }
    int points(int axis) const;  // canal-sampled points along axis
    Eigen::Index size() const;
    double width(int axis) const { return 0.5 * torus_.length(axis); }
    RealField coordinate(int axis) const;

    RealField extend(const RealField& u, Parity p0, Parity p1 = Parity::even) const;
    RealField restrict(const RealField& u) const;
    // u(-x) along one axis of a torus field.
    RealField reflect(const RealField& u, int axis) const;
    // Canal flat indices of the wall lines of a reflected axis (both walls).
    std::vector<Eigen::Index> wall_nodes(int axis) const;

private:
    PeriodicGrid torus_;
    bool basin_;
};

RealField even_extension(const CanalDomain& dom, const RealField& u);
RealField odd_extension(const CanalDomain& dom, const RealField& u);

// Finite-difference weights for derivatives 0..order at z from nodes x.
Eigen::MatrixXd fornberg_weights(double z, const std::vector<double>& x, int order);

struct CanalData {
    RealField eta0;
    RealField psi0;
    RealField B0;
    VectorField V0;
    double s = 3.0;
};

struct CompatibilityReport {
    std::map<std::string, double> defects;
    double tol = 0.0;
    bool pass = true;
    std::string summary() const;
};

class CompatibilityError : public std::runtime_error {
public:
    CompatibilityError(const CompatibilityReport& r) : std::runtime_error("incompatible canal data: " + r.summary()), report(r) {}
    CompatibilityReport report;
};

class ParityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// B0, V0 from the torus traces of the even extensions of (eta0, psi0).
CanalData canal_data_from_surface(WaterWaveModel& m, const CanalDomain& dom, const RealField& eta0, const RealField& psi0,
                                  double s = 3.0);
// One-sided stencils of `stencil_order` along the wall normal (needs stencil_order + 1 canal points).
CompatibilityReport compatibility_check(const CanalDomain& dom, const CanalData& data, double tol, int stencil_order = 10);

struct CanalOptions {
    double compat_tol = 1e-8;
    double parity_tol = 1e-10;
    int projection_every = 0;  // 0: monitor only
};

struct CanalRun {
    Trajectory torus;
    std::vector<SurfaceState> canal;
    CompatibilityReport compatibility;
    double max_parity_defect = 0.0;
    double max_wall_slope = 0.0;
    double max_wall_normal_velocity = 0.0;
};

// Parity defects of a torus state: eta/psi even, normal velocity odd per reflected axis, plus wall quantities.
std::map<std::string, double> parity_defects(WaterWaveModel& m, const CanalDomain& dom, const SurfaceState& s);

CanalRun canal_simulate(WaterWaveModel& m, const CanalDomain& dom, const CanalData& data, double T, const StepConfig& cfg,
                        const CanalOptions& opt = {}, const DiagnosticsSink& sink = nullptr);

// Decay exponent sigma of dyadic block L2 norms |Delta_j u| ~ 2^{-j sigma} over j = jlo..jhi.
double block_decay_exponent(const PeriodicGrid& grid, const RealField& u, int jlo, int jhi);

}  // namespace ulwaves
