#include "ulwaves/canal.hpp"

#include <cmath>
#include <sstream>

#include "ulwaves/fit.hpp"
#include "ulwaves/ul_spaces.hpp"

namespace ulwaves {

CanalDomain::CanalDomain(const PeriodicGrid& torus, bool basin) : torus_(torus), basin_(basin)
{
    if (basin && torus.dims() != 2) throw InvalidGrid("a basin needs a two-dimensional torus");
    for (int a = 0; a < torus.dims(); ++a) {
        if (reflected(a) && torus.points(a) % 2 != 0) throw InvalidGrid("reflected axes need an even number of torus points");
    }
}

int CanalDomain::points(int axis) const
{
    return reflected(axis) ? torus_.points(axis) / 2 + 1 : torus_.points(axis);
}

Eigen::Index CanalDomain::size() const
{
    Eigen::Index n = points(0);
    if (torus_.dims() == 2) n *= points(1);
    return n;
}

RealField CanalDomain::coordinate(int axis) const
{
    const int m0 = points(0);
    RealField x(size());
    for (Eigen::Index f = 0; f < size(); ++f) {
        const int i = axis == 0 ? static_cast<int>(f % m0) : static_cast<int>(f / m0);
        x(f) = i * torus_.spacing(axis);
    }
    return x;
}

namespace {

// Source index along one axis for torus node i; sign -1 for a mirrored odd sample.
int fold(int i, int n, bool refl, Parity p, double& sign)
{
    if (!refl || i <= n / 2) return i;
    sign *= p == Parity::odd ? -1.0 : 1.0;
    return n - i;
}

}  // namespace

RealField CanalDomain::extend(const RealField& u, Parity p0, Parity p1) const
{
    if (u.size() != size()) {
        std::ostringstream os;
        os << "canal field has " << u.size() << " samples, canal grid has " << size();
        throw GridMismatch(os.str());
    }
    const int n0 = torus_.points(0), m0 = points(0);
    const int n1 = torus_.dims() == 2 ? torus_.points(1) : 1;
    RealField out(torus_.size());
    for (int i1 = 0; i1 < n1; ++i1) {
        for (int i0 = 0; i0 < n0; ++i0) {
            double sign = 1.0;
            const int s0 = fold(i0, n0, true, p0, sign);
            const int s1 = torus_.dims() == 2 ? fold(i1, n1, reflected(1), p1, sign) : 0;
            out(i0 + static_cast<Eigen::Index>(n0) * i1) = sign * u(s0 + static_cast<Eigen::Index>(m0) * s1);
        }
    }
    return out;
}

RealField CanalDomain::restrict(const RealField& u) const
{
    check_size(torus_, u.size(), "canal restriction");
    const int n0 = torus_.points(0), m0 = points(0);
    const int m1 = torus_.dims() == 2 ? points(1) : 1;
    RealField out(size());
    for (int i1 = 0; i1 < m1; ++i1)
        for (int i0 = 0; i0 < m0; ++i0) out(i0 + static_cast<Eigen::Index>(m0) * i1) = u(i0 + static_cast<Eigen::Index>(n0) * i1);
    return out;
}

RealField CanalDomain::reflect(const RealField& u, int axis) const
{
    check_size(torus_, u.size(), "canal reflection");
    const int n0 = torus_.points(0);
    const int n1 = torus_.dims() == 2 ? torus_.points(1) : 1;
    RealField out(u.size());
    for (int i1 = 0; i1 < n1; ++i1) {
        for (int i0 = 0; i0 < n0; ++i0) {
            const int j0 = axis == 0 ? (n0 - i0) % n0 : i0;
            const int j1 = axis == 1 ? (n1 - i1) % n1 : i1;
            out(i0 + static_cast<Eigen::Index>(n0) * i1) = u(j0 + static_cast<Eigen::Index>(n0) * j1);
        }
    }
    return out;
}

std::vector<Eigen::Index> CanalDomain::wall_nodes(int axis) const
{
    if (!reflected(axis)) throw std::invalid_argument("axis has no walls");
    const int m0 = points(0);
    const int m1 = torus_.dims() == 2 ? points(1) : 1;
    std::vector<Eigen::Index> out;
    if (axis == 0) {
        for (int i1 = 0; i1 < m1; ++i1) {
            out.push_back(static_cast<Eigen::Index>(m0) * i1);
            out.push_back(m0 - 1 + static_cast<Eigen::Index>(m0) * i1);
        }
    } else {
        for (int i0 = 0; i0 < m0; ++i0) {
            out.push_back(i0);
            out.push_back(i0 + static_cast<Eigen::Index>(m0) * (m1 - 1));
        }
    }
    return out;
}

RealField even_extension(const CanalDomain& dom, const RealField& u) { return dom.extend(u, Parity::even, Parity::even); }
RealField odd_extension(const CanalDomain& dom, const RealField& u) { return dom.extend(u, Parity::odd, Parity::even); }

Eigen::MatrixXd fornberg_weights(double z, const std::vector<double>& x, int order)
{
    const int n = static_cast<int>(x.size()) - 1;
    if (n < order) throw std::invalid_argument("fornberg_weights: too few nodes for the derivative order");
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n + 1, order + 1);
    double c1 = 1.0, c4 = x[0] - z;
    c(0, 0) = 1.0;
    for (int i = 1; i <= n; ++i) {
        const int mn = std::min(i, order);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i] - z;
        for (int j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) c(i, k) = c1 * (k * c(i - 1, k - 1) - c5 * c(i - 1, k)) / c2;
                c(i, 0) = -c1 * c5 * c(i - 1, 0) / c2;
            }
            for (int k = mn; k >= 1; --k) c(j, k) = (c4 * c(j, k) - k * c(j, k - 1)) / c3;
            c(j, 0) = c4 * c(j, 0) / c3;
        }
        c1 = c2;
    }
    return c;
}

std::string CompatibilityReport::summary() const
{
    std::ostringstream os;
    os << (pass ? "pass" : "fail") << " (tol " << tol << ")";
    for (const auto& [k, v] : defects) os << "; " << k << " = " << v;
    return os.str();
}

CanalData canal_data_from_surface(WaterWaveModel& m, const CanalDomain& dom, const RealField& eta0, const RealField& psi0,
                                  double s)
{
    SurfaceState st{even_extension(dom, eta0), even_extension(dom, psi0)};
    const TraceFields tr = trace_velocities(m, st);
    CanalData d;
    d.eta0 = eta0;
    d.psi0 = psi0;
    d.B0 = dom.restrict(tr.B);
    for (const auto& v : tr.V) d.V0.push_back(dom.restrict(v));
    d.s = s;
    return d;
}

namespace {

// max over the wall lines of |d^k u / dn^k| by one-sided stencils.
double wall_derivative(const CanalDomain& dom, const RealField& u, int axis, int k, int stencil_order)
{
    const int m0 = dom.points(0);
    const int m_axis = dom.points(axis);
    if (m_axis < stencil_order + 1) throw std::invalid_argument("canal too coarse for the wall stencil");
    const double dx = dom.torus().spacing(axis);
    std::vector<double> nodes(stencil_order + 1);
    for (int i = 0; i <= stencil_order; ++i) nodes[i] = i * dx;
    const Eigen::VectorXd w = fornberg_weights(0.0, nodes, k).col(k);
    const Eigen::Index stride = axis == 0 ? 1 : m0;
    double worst = 0.0;
    for (Eigen::Index f : dom.wall_nodes(axis)) {
        const int pos = axis == 0 ? static_cast<int>(f % m0) : static_cast<int>(f / m0);
        const double dir = pos == 0 ? 1.0 : -1.0;  // inward
        double acc = 0.0;
        for (int i = 0; i <= stencil_order; ++i) acc += w(i) * u(f + static_cast<Eigen::Index>(dir * i) * stride);
        worst = std::max(worst, std::abs(acc));  // sign of the odd derivatives is irrelevant
    }
    return worst;
}

double wall_trace(const CanalDomain& dom, const RealField& u, int axis)
{
    double worst = 0.0;
    for (Eigen::Index f : dom.wall_nodes(axis)) worst = std::max(worst, std::abs(u(f)));
    return worst;
}

}  // namespace

CompatibilityReport compatibility_check(const CanalDomain& dom, const CanalData& data, double tol, int stencil_order)
{
    CompatibilityReport r;
    r.tol = tol;
    const int dims = dom.torus().dims();
    if (static_cast<int>(data.V0.size()) != dims) throw std::invalid_argument("V0 needs one component per dimension");
    for (int a = 0; a < dims; ++a) {
        if (!dom.reflected(a)) continue;
        const std::string ax = std::to_string(a);
        r.defects["d_n eta0 [wall " + ax + "]"] = wall_derivative(dom, data.eta0, a, 1, stencil_order);
        r.defects["d_n psi0 [wall " + ax + "]"] = wall_derivative(dom, data.psi0, a, 1, stencil_order);
        r.defects["d_n B0 [wall " + ax + "]"] = wall_derivative(dom, data.B0, a, 1, stencil_order);
        for (int b = 0; b < dims; ++b) {
            if (b == a) continue;
            r.defects["d_n V0_" + std::to_string(b) + " [wall " + ax + "]"] = wall_derivative(dom, data.V0[b], a, 1, stencil_order);
        }
        r.defects["V0_" + ax + " trace [wall " + ax + "]"] = wall_trace(dom, data.V0[a], a);
        if (data.s > 2.5)
            r.defects["d_nn V0_" + ax + " [wall " + ax + "]"] = wall_derivative(dom, data.V0[a], a, 2, stencil_order);
    }
    for (const auto& [k, v] : r.defects) r.pass = r.pass && v <= tol;
    return r;
}

std::map<std::string, double> parity_defects(WaterWaveModel& m, const CanalDomain& dom, const SurfaceState& s)
{
    const PeriodicGrid& g = dom.torus();
    std::map<std::string, double> out;
    const TraceFields tr = trace_velocities(m, s);
    const VectorField ge = spectral_gradient(g, s.eta);
    for (int a = 0; a < g.dims(); ++a) {
        if (!dom.reflected(a)) continue;
        const std::string ax = std::to_string(a);
        out["eta even " + ax] = (s.eta - dom.reflect(s.eta, a)).abs().maxCoeff();
        out["psi even " + ax] = (s.psi - dom.reflect(s.psi, a)).abs().maxCoeff();
        out["V" + ax + " odd " + ax] = (tr.V[a] + dom.reflect(tr.V[a], a)).abs().maxCoeff();
        out["wall slope " + ax] = wall_trace(dom, dom.restrict(ge[a]), a);
        out["wall normal velocity " + ax] = wall_trace(dom, dom.restrict(tr.V[a]), a);
    }
    return out;
}

CanalRun canal_simulate(WaterWaveModel& m, const CanalDomain& dom, const CanalData& data, double T, const StepConfig& cfg,
                        const CanalOptions& opt, const DiagnosticsSink& sink)
{
    if (!(m.grid() == dom.torus())) throw GridMismatch("canal model and domain use different tori");
    CanalRun run;
    run.compatibility = compatibility_check(dom, data, opt.compat_tol);
    if (!run.compatibility.pass) throw CompatibilityError(run.compatibility);

    const SurfaceState s0{even_extension(dom, data.eta0), even_extension(dom, data.psi0)};
    long step = 0;
    const StepHook hook = [&](SurfaceState& s, DiagnosticsRecord& r) {
        if (opt.projection_every > 0 && step > 0 && step % opt.projection_every == 0) {
            for (int a = 0; a < dom.torus().dims(); ++a) {
                if (!dom.reflected(a)) continue;
                s.eta = 0.5 * (s.eta + dom.reflect(s.eta, a));
                s.psi = 0.5 * (s.psi + dom.reflect(s.psi, a));
            }
        }
        ++step;
        r.parity_defects = parity_defects(m, dom, s);
        for (const auto& [k, v] : r.parity_defects) {
            if (k.rfind("wall", 0) == 0) {
                if (k.rfind("wall slope", 0) == 0) run.max_wall_slope = std::max(run.max_wall_slope, v);
                else run.max_wall_normal_velocity = std::max(run.max_wall_normal_velocity, v);
                continue;
            }
            run.max_parity_defect = std::max(run.max_parity_defect, v);
            if (!(v <= opt.parity_tol) && r.abort_reason.empty()) {
                std::ostringstream os;
                os << "parity monitor: " << k << " defect " << v << " exceeds " << opt.parity_tol;
                r.abort_reason = os.str();
            }
        }
    };
    run.torus = integrate(m, s0, T, cfg, sink, hook);
    for (const auto& s : run.torus.states) run.canal.push_back({dom.restrict(s.eta), dom.restrict(s.psi), s.t});
    return run;
}

double block_decay_exponent(const PeriodicGrid& grid, const RealField& u, int jlo, int jhi)
{
    const DyadicDecomposition dd(grid);
    if (jlo < 0 || jhi > dd.jmax() || jhi - jlo < 1) throw BlockIndexError("block range outside the grid's dyadic ladder");
    const std::vector<double> norms = block_l2_norms(u, dd);
    std::vector<double> js, ls;
    for (int j = jlo; j <= jhi; ++j) {
        js.push_back(j);
        ls.push_back(std::log2(norms[j + 1]));
    }
    return -line_fit(js, ls).slope;
}

}  // namespace ulwaves
