#include "ulwaves/water_waves.hpp"

#include <cmath>

namespace ulwaves {

WaterWaveModel::WaterWaveModel(const PeriodicGrid& grid, const PhysicsParams& phys, const DnoParams& dno)
    : grid_(grid), phys_(phys), dno_(grid, [&] {
          DnoParams p = dno;
          p.h = phys.h;
          return p;
      }())
{
}

RealField WaterWaveModel::G(const RealField& eta, const RealField& psi)
{
    check_size(grid_, psi.size(), "G");
    if (last_psi_.size() == psi.size() && (last_psi_ == psi).all() && dno_.surface().size() == eta.size() &&
        (dno_.surface() == eta).all())
        return last_g_;
    dno_.set_surface(eta);
    last_g_ = dno_.apply(psi);
    last_psi_ = psi;
    return last_g_;
}

const PlaneField& WaterWaveModel::potential(const RealField& eta, const RealField& psi)
{
    G(eta, psi);
    return dno_.potential();
}

TraceFields trace_velocities(WaterWaveModel& m, const SurfaceState& s, const RealField* G_psi)
{
    const PeriodicGrid& g = m.grid();
    TraceFields tr;
    tr.G_psi = G_psi ? *G_psi : m.G(s.eta, s.psi);
    const VectorField ge = spectral_gradient(g, s.eta);
    const VectorField gp = spectral_gradient(g, s.psi);
    RealField num = tr.G_psi, q = RealField::Ones(g.size());
    for (int a = 0; a < g.dims(); ++a) {
        num += ge[a] * gp[a];
        q += ge[a].square();
    }
    tr.B = num / q;
    for (int a = 0; a < g.dims(); ++a) tr.V.push_back(gp[a] - tr.B * ge[a]);
    return tr;
}

Tendency ww_rhs(WaterWaveModel& m, const SurfaceState& s)
{
    const PeriodicGrid& g = m.grid();
    Tendency out;
    out.G_psi = m.G(s.eta, s.psi);
    const VectorField ge = spectral_gradient(g, s.eta);
    const VectorField gp = spectral_gradient(g, s.psi);
    RealField gp2 = RealField::Zero(g.size()), dot = out.G_psi, q = RealField::Ones(g.size());
    for (int a = 0; a < g.dims(); ++a) {
        gp2 += gp[a].square();
        dot += ge[a] * gp[a];
        q += ge[a].square();
    }
    out.deta = dealias(g, out.G_psi);
    out.dpsi = dealias(g, RealField(-0.5 * gp2 + 0.5 * dot.square() / q - m.physics().g * s.eta));
    return out;
}

PlaneField hessian_square(LaplaceSolver& s, const PlaneField& phi)
{
    const PlaneField l1 = s.lambda1(phi);
    const std::vector<PlaneField> l2 = s.lambda2(phi);
    PlaneField sum = s.lambda1(l1).array().square().matrix();
    for (const auto& c : s.lambda2(l1)) sum.array() += c.array().square();
    for (const auto& la : l2) {
        sum.array() += s.lambda1(la).array().square();
        for (const auto& c : s.lambda2(la)) sum.array() += c.array().square();
    }
    return sum;
}

const RealField& taylor_coefficient(WaterWaveModel& m, const SurfaceState& s, TraceFields& tr)
{
    const PlaneField phi = m.potential(s.eta, s.psi);
    LaplaceSolver& ls = m.dno().laplace();
    const StraightenedDomain& d = ls.domain();
    const int nz = d.zpoints;
    const PlaneField src = (-d.alpha.array() * hessian_square(ls, phi).array()).matrix();
    const PlaneField l1 = ls.lambda1(phi);
    PlaneField kin = l1.array().square().matrix();
    for (const auto& c : ls.lambda2(phi)) kin.array() += c.array().square();
    kin *= 0.5;
    const RealField flux = -m.physics().g - ls.conormal(kin, nz);
    const PlaneField P = ls.solve(RealField::Zero(m.grid().size()), &src, &flux);
    const Eigen::VectorXd pz = P * d.column.D.row(0).transpose();
    tr.a = -(pz.array() / d.rho_z.col(0).array());
    return tr.a;
}

double hamiltonian(WaterWaveModel& m, const SurfaceState& s, const RealField* G_psi)
{
    const RealField gp = G_psi ? *G_psi : m.G(s.eta, s.psi);
    return 0.5 * inner_product(m.grid(), s.psi, gp) + 0.5 * m.physics().g * inner_product(m.grid(), s.eta, s.eta);
}

double mass(const PeriodicGrid& grid, const SurfaceState& s) { return integral(grid, s.eta); }

ResidualReport reformulated_residuals(WaterWaveModel& m, const SurfaceState& prev, const SurfaceState& mid,
                                      const SurfaceState& next)
{
    const PeriodicGrid& g = m.grid();
    const int dims = g.dims();
    const double two_dt = next.t - prev.t;
    TraceFields tp = trace_velocities(m, prev), tn = trace_velocities(m, next);
    TraceFields tm = trace_velocities(m, mid);
    taylor_coefficient(m, mid, tm);
    const VectorField zp = spectral_gradient(g, prev.eta), zn = spectral_gradient(g, next.eta), zm = spectral_gradient(g, mid.eta);
    auto advect = [&](const RealField& f) {
        const VectorField gf = spectral_gradient(g, f);
        RealField out = RealField::Zero(g.size());
        for (int a = 0; a < dims; ++a) out += tm.V[a] * gf[a];
        return out;
    };
    ResidualReport r;
    const RealField rb = (tn.B - tp.B) / two_dt + advect(tm.B) - (tm.a - m.physics().g);
    r.B = l2_norm(g, rb);
    VectorField rv, gv;
    const RealField gb = m.G(mid.eta, tm.B);
    for (int a = 0; a < dims; ++a) {
        rv.push_back((tn.V[a] - tp.V[a]) / two_dt + advect(tm.V[a]) + tm.a * zm[a]);
        gv.push_back(m.G(mid.eta, tm.V[a]));
        r.R.push_back((zn[a] - zp[a]) / two_dt + advect(zm[a]) - gv[a] - zm[a] * gb);
    }
    r.V = l2_norm(g, rv);
    r.zeta = l2_norm(g, r.R);
    r.GV = l2_norm(g, gv);
    return r;
}

}  // namespace ulwaves
