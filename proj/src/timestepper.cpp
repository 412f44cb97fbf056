#include "ulwaves/timestepper.hpp"

#include <cmath>
#include <sstream>

#include "ulwaves/symmetrizer.hpp"
#include "ulwaves/ul_spaces.hpp"

namespace ulwaves {

void validate(const StepConfig& cfg)
{
    if (!(cfg.dt != 0.0) || !std::isfinite(cfg.dt)) throw ConfigError("dt must be finite and nonzero");
    if (!(cfg.epsilon >= 0.0)) throw ConfigError("epsilon must be >= 0");
    if (!(cfg.fixed_point_tol > 0.0) || cfg.fixed_point_max_iter < 1) throw ConfigError("fixed-point tolerances must be positive");
    if (cfg.scheme == Scheme::parabolic && !(cfg.epsilon > 0.0))
        throw ConfigError("the parabolic scheme needs epsilon > 0");
    if (cfg.monitors.taylor_every < 1) throw ConfigError("taylor_every must be >= 1");
}

double max_linear_frequency(const PeriodicGrid& grid, const PhysicsParams& phys)
{
    const auto mask = dealias_mask(grid);
    double w = 0.0;
    for (int i = 0; i < grid.size(); ++i) {
        if (!mask(i)) continue;
        const double k = grid.frequency(i).norm();
        w = std::max(w, std::sqrt(phys.g * k * std::tanh(k * phys.h)));
    }
    return w;
}

void check_cfl(const PeriodicGrid& grid, const PhysicsParams& phys, const StepConfig& cfg)
{
    const double w = max_linear_frequency(grid, phys);
    if (std::abs(cfg.dt) * w > cfg.c_cfl) {
        std::ostringstream os;
        os << "CFL violated: |dt| = " << std::abs(cfg.dt) << " exceeds " << cfg.c_cfl / w;
        throw ConfigError(os.str());
    }
}

namespace {

Tendency regularized_rhs(WaterWaveModel& m, const SurfaceState& s, double eps)
{
    Tendency f = ww_rhs(m, s);
    if (eps > 0.0) {
        f.deta += eps * spectral_laplacian(m.grid(), s.eta);
        f.dpsi += eps * spectral_laplacian(m.grid(), s.psi);
    }
    return f;
}

SurfaceState axpy(const SurfaceState& s, double c, const Tendency& f)
{
    return {s.eta + c * f.deta, s.psi + c * f.dpsi, s.t};
}

}  // namespace

SurfaceState rk4_step(WaterWaveModel& m, const SurfaceState& s, const StepConfig& cfg)
{
    const double dt = cfg.dt, eps = cfg.epsilon;
    const Tendency k1 = regularized_rhs(m, s, eps);
    const Tendency k2 = regularized_rhs(m, axpy(s, dt / 2, k1), eps);
    const Tendency k3 = regularized_rhs(m, axpy(s, dt / 2, k2), eps);
    const Tendency k4 = regularized_rhs(m, axpy(s, dt, k3), eps);
    SurfaceState out;
    out.eta = s.eta + dt / 6 * (k1.deta + 2 * k2.deta + 2 * k3.deta + k4.deta);
    out.psi = s.psi + dt / 6 * (k1.dpsi + 2 * k2.dpsi + 2 * k3.dpsi + k4.dpsi);
    out.t = s.t + dt;
    return out;
}

SurfaceState parabolic_step(WaterWaveModel& m, const SurfaceState& s, const StepConfig& cfg, const Nonlinearity& A)
{
    const PeriodicGrid& g = m.grid();
    const double dt = cfg.dt, eps = cfg.epsilon;
    const ComplexField E = lattice_values(g, [&](const Frequency& k) { return Complex(std::exp(-eps * dt * k.squaredNorm()), 0); });
    auto heat = [&](const RealField& u) { return fourier_multiplier(g, u, E); };
    auto nonlin = [&](const SurfaceState& u) { return A ? A(u) : ww_rhs(m, u); };

    const Tendency a0 = nonlin(s);
    const RealField base_eta = heat(RealField(s.eta + dt / 2 * a0.deta));
    const RealField base_psi = heat(RealField(s.psi + dt / 2 * a0.dpsi));
    SurfaceState u{s.eta, s.psi, s.t + dt};
    const double scale = std::max(1.0, std::sqrt(inner_product(g, s.eta, s.eta) + inner_product(g, s.psi, s.psi)));
    for (int it = 0; it < cfg.fixed_point_max_iter; ++it) {
        const Tendency a1 = nonlin(u);
        const RealField eta = base_eta + dt / 2 * a1.deta;
        const RealField psi = base_psi + dt / 2 * a1.dpsi;
        const double d = std::sqrt(inner_product(g, RealField(eta - u.eta), RealField(eta - u.eta)) +
                                   inner_product(g, RealField(psi - u.psi), RealField(psi - u.psi)));
        u.eta = eta;
        u.psi = psi;
        if (!std::isfinite(d)) break;
        if (d <= cfg.fixed_point_tol * scale) return u;
    }
    std::ostringstream os;
    os << "parabolic fixed point did not converge in " << cfg.fixed_point_max_iter << " iterations at dt = " << dt;
    throw StepError(os.str());
}

DiagnosticsRecord diagnose(WaterWaveModel& m, const SurfaceState& s, const StepConfig& cfg, bool full)
{
    const PeriodicGrid& g = m.grid();
    const MonitorFlags& mon = cfg.monitors;
    DiagnosticsRecord r;
    r.t = s.t;
    r.mass = mass(g, s);
    r.min_depth = m.physics().h + s.eta.minCoeff();
    if (mon.depth && !(r.min_depth > mon.depth_floor)) {
        std::ostringstream os;
        os << "depth monitor: min depth " << r.min_depth << " <= floor " << mon.depth_floor;
        r.abort_reason = os.str();
        return r;
    }
    r.hamiltonian = hamiltonian(m, s);
    if (!std::isfinite(r.hamiltonian)) {
        r.abort_reason = "non-finite hamiltonian";
        return r;
    }
    if (!mon.ul_s.empty()) {
        const PartitionOfUnity pou(g);
        for (double sv : mon.ul_s) r.ul_norms[sv] = ul_sobolev_norm(s.eta, sv, pou);
    }
    if (full && (mon.taylor || mon.energy)) {
        TraceFields tr = trace_velocities(m, s);
        taylor_coefficient(m, s, tr);
        r.min_taylor = tr.a.minCoeff();
        if (mon.taylor && !(r.min_taylor > mon.taylor_floor)) {
            std::ostringstream os;
            os << "Taylor monitor: min a " << r.min_taylor << " <= floor " << mon.taylor_floor;
            r.abort_reason = os.str();
            return r;
        }
        if (mon.energy) {
            const GoodUnknowns gu = good_unknowns(g, s.eta, tr, mon.symmetrizer_s);
            SymmetrizedPair p{gu.Us, theta_s(g, gu.zeta_s, q_symbol(g, tr.a, s.eta)), mon.symmetrizer_s};
            r.symmetrized_energy = symmetrized_energy(p, PartitionOfUnity(g)).total;
        }
    }
    return r;
}

double weak_distance(WaterWaveModel& m, const SurfaceState& a, const SurfaceState& b, double s)
{
    const PeriodicGrid& g = m.grid();
    const TraceFields ta = trace_velocities(m, a), tb = trace_velocities(m, b);
    VectorField dv;
    for (int c = 0; c < g.dims(); ++c) dv.push_back(ta.V[c] - tb.V[c]);
    return sobolev_norm(g, RealField(a.eta - b.eta), s - 0.5) + sobolev_norm(g, RealField(a.psi - b.psi), s - 0.5) +
           sobolev_norm(g, RealField(ta.B - tb.B), s - 1.0) + sobolev_norm(g, dv, s - 1.0);
}

Trajectory integrate(WaterWaveModel& m, const SurfaceState& s0, double T, const StepConfig& cfg,
                     const DiagnosticsSink& sink, const StepHook& hook, int store_every)
{
    validate(cfg);
    if (cfg.scheme == Scheme::rk4) check_cfl(m.grid(), m.physics(), cfg);
    const long steps = std::lround(std::abs(T / cfg.dt));
    Trajectory traj;
    SurfaceState s = s0;

    auto record = [&](long n, SurfaceState& st) {
        DiagnosticsRecord extra;
        if (hook) hook(st, extra);
        DiagnosticsRecord r;
        try {
            r = diagnose(m, st, cfg, n % cfg.monitors.taylor_every == 0 || n == steps);
        } catch (const std::exception& e) {
            r.t = st.t;
            r.abort_reason = e.what();
        }
        r.parity_defects = std::move(extra.parity_defects);
        if (r.abort_reason.empty()) r.abort_reason = extra.abort_reason;
        if (sink) sink(r);
        if (n % store_every == 0 || n == steps || !r.abort_reason.empty()) traj.states.push_back(st);
        traj.diagnostics.push_back(r);
        traj.abort_reason = r.abort_reason;
        return r.abort_reason.empty();
    };

    if (!record(0, s)) return traj;
    for (long n = 1; n <= steps; ++n) {
        const double t_next = s0.t + n * cfg.dt;
        try {
            if (cfg.scheme == Scheme::rk4) {
                s = rk4_step(m, s, cfg);
            } else {
                // Halve dt on fixed-point failure, covering the same interval with substeps.
                for (int halvings = 0;; ++halvings) {
                    try {
                        StepConfig sub = cfg;
                        sub.dt = cfg.dt / (1 << halvings);
                        SurfaceState u = s;
                        for (int k = 0; k < (1 << halvings); ++k) u = parabolic_step(m, u, sub);
                        s = u;
                        break;
                    } catch (const StepError&) {
                        if (halvings >= cfg.max_dt_halvings) throw;
                    }
                }
            }
        } catch (const std::exception& e) {
            DiagnosticsRecord r;
            r.t = t_next;
            r.abort_reason = e.what();
            if (sink) sink(r);
            traj.diagnostics.push_back(r);
            traj.abort_reason = r.abort_reason;
            return traj;
        }
        s.t = t_next;
        if (!record(n, s)) return traj;
    }
    return traj;
}

}  // namespace ulwaves
