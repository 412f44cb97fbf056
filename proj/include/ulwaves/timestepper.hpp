#pragma once

#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ulwaves/water_waves.hpp"

namespace ulwaves {

enum class Scheme { rk4, parabolic };

class StepError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct MonitorFlags {
    bool taylor = true;
    bool depth = true;
    bool energy = false;  // symmetrized energy, sampled with the Taylor monitor
    int taylor_every = 5;
    double taylor_floor = 0.0;
    double depth_floor = 0.0;
    double symmetrizer_s = 2.0;
    std::vector<double> ul_s;
};

struct StepConfig {
    double epsilon = 0.0;
    double dt = 1e-2;
    Scheme scheme = Scheme::rk4;
    double fixed_point_tol = 1e-12;
    int fixed_point_max_iter = 60;
    int max_dt_halvings = 4;
    double c_cfl = 2.5;
    MonitorFlags monitors;
};

constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

struct DiagnosticsRecord {
    double t = 0.0;
    double hamiltonian = nan_value;
    double mass = nan_value;
    double min_taylor = nan_value;
    double min_depth = nan_value;
    double symmetrized_energy = nan_value;
    std::map<double, double> ul_norms;
    std::map<std::string, double> parity_defects;
    std::string abort_reason;
};

using DiagnosticsSink = std::function<void(const DiagnosticsRecord&)>;
// Nonlinear part A(U) of the regularized system; the default is ww_rhs.
using Nonlinearity = std::function<Tendency(const SurfaceState&)>;
// Called after every accepted step; may adjust the state, fill record fields or set abort_reason.
using StepHook = std::function<void(SurfaceState&, DiagnosticsRecord&)>;

struct Trajectory {
    std::vector<SurfaceState> states;
    std::vector<DiagnosticsRecord> diagnostics;
    std::string abort_reason;
    bool aborted() const { return !abort_reason.empty(); }
};

void validate(const StepConfig& cfg);
// Largest sqrt(g k tanh kh) over the dealiased lattice.
double max_linear_frequency(const PeriodicGrid& grid, const PhysicsParams& phys);
void check_cfl(const PeriodicGrid& grid, const PhysicsParams& phys, const StepConfig& cfg);

SurfaceState rk4_step(WaterWaveModel& m, const SurfaceState& s, const StepConfig& cfg);
// U1 = E U0 + dt/2 (E A(U0) + A(U1)), E = exp(eps dt Laplacian), fixed point warm-started at U0.
SurfaceState parabolic_step(WaterWaveModel& m, const SurfaceState& s, const StepConfig& cfg,
                            const Nonlinearity& A = nullptr);

// Step count is round(T / |dt|); a negative dt integrates backwards.
Trajectory integrate(WaterWaveModel& m, const SurfaceState& s0, double T, const StepConfig& cfg,
                     const DiagnosticsSink& sink = nullptr, const StepHook& hook = nullptr, int store_every = 1);

// |d eta|_{H^{s-1/2}} + |d psi|_{H^{s-1/2}} + |d B|_{H^{s-1}} + |d V|_{H^{s-1}}.
double weak_distance(WaterWaveModel& m, const SurfaceState& a, const SurfaceState& b, double s);

DiagnosticsRecord diagnose(WaterWaveModel& m, const SurfaceState& s, const StepConfig& cfg, bool full);

}  // namespace ulwaves
