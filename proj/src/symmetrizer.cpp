#include "ulwaves/symmetrizer.hpp"

#include <cmath>
#include <sstream>

namespace ulwaves {

GoodUnknowns good_unknowns(const PeriodicGrid& grid, const RealField& eta, const TraceFields& tr, double s,
                           const CutoffPair& cut)
{
    const auto bracket = [s](const Frequency& k) { return Complex(std::pow(1.0 + k.squaredNorm(), 0.5 * s), 0.0); };
    const RealField Bs = fourier_multiplier(grid, tr.B, bracket);
    const VectorField zeta = spectral_gradient(grid, eta);
    GoodUnknowns out;
    for (int a = 0; a < grid.dims(); ++a) {
        out.Us.push_back(fourier_multiplier(grid, tr.V[a], bracket) + paraproduct(grid, zeta[a], Bs, cut));
        out.zeta_s.push_back(fourier_multiplier(grid, zeta[a], bracket));
    }
    return out;
}

namespace {

void check_taylor(const RealField& a)
{
    const double amin = a.minCoeff();
    if (!(amin > 0.0)) {
        std::ostringstream os;
        os << "Taylor sign violated: min a = " << amin;
        throw TaylorSignViolation(os.str());
    }
}

}  // namespace

SymbolPair symmetrizer_symbols(const PeriodicGrid& grid, const RealField& a, const RealField& eta, const Frequency& xi)
{
    check_size(grid, a.size(), "symmetrizer_symbols");
    check_taylor(a);
    const RealField lam = dno_principal_symbol(grid, eta, xi);
    return {(a * lam).sqrt(), (a / lam).sqrt()};
}

ParaSymbol q_symbol(const PeriodicGrid& grid, const RealField& a, const RealField& eta)
{
    check_taylor(a);
    ParaSymbol q;
    q.order = -0.5;
    q.regularity = 0.5;
    const VectorField ge = spectral_gradient(grid, eta);
    RealField q2 = RealField::Ones(grid.size());
    for (const auto& c : ge) q2 += c.square();
    q.eval = [a, ge, q2, n = grid.size()](const Frequency& xi) -> ComplexField {
        const double x2 = xi.squaredNorm();
        if (x2 == 0.0) return ComplexField::Zero(n);
        RealField dot = RealField::Zero(n);
        for (std::size_t c = 0; c < ge.size(); ++c) dot += ge[c] * xi[c];
        const RealField lam = (q2 * x2 - dot.square()).sqrt();
        return (a / lam).sqrt().cast<Complex>();
    };
    return q;
}

VectorField theta_s(const PeriodicGrid& grid, const VectorField& zeta_s, const ParaSymbol& q, const CutoffPair& cut)
{
    VectorField out;
    for (const auto& z : zeta_s) out.push_back(paradiff_apply(grid, q, z, cut));
    return out;
}

DecouplingPair decoupling_symbols(double alpha, const Frequency& beta, const Frequency& xi)
{
    if (beta.size() != xi.size()) throw std::invalid_argument("decoupling_symbols: beta and xi differ in dimension");
    const double bx = beta.dot(xi);
    const double disc = 4.0 * alpha * xi.squaredNorm() - bx * bx;
    if (!(disc > 0.0)) {
        std::ostringstream os;
        os << "decoupling_symbols: 4 alpha |xi|^2 - (beta.xi)^2 = " << disc;
        throw EllipticityError(os.str());
    }
    const double r = std::sqrt(disc);
    return {Complex(-0.5 * r, -0.5 * bx), Complex(0.5 * r, -0.5 * bx)};
}

EnergySplit symmetrized_energy(const SymmetrizedPair& pair, const PartitionOfUnity& pou)
{
    EnergySplit e;
    e.Us = std::pow(ul_sobolev_norm(pair.Us, 0.0, pou), 2);
    e.theta = std::pow(ul_sobolev_norm(pair.theta_s, 0.0, pou), 2);
    e.total = e.Us + e.theta;
    return e;
}

SymmetrizedPair symmetrize(WaterWaveModel& m, const SurfaceState& state, double s, const CutoffPair& cut)
{
    TraceFields tr = trace_velocities(m, state);
    taylor_coefficient(m, state, tr);
    const GoodUnknowns gu = good_unknowns(m.grid(), state.eta, tr, s, cut);
    SymmetrizedPair p;
    p.s = s;
    p.Us = gu.Us;
    p.theta_s = theta_s(m.grid(), gu.zeta_s, q_symbol(m.grid(), tr.a, state.eta), cut);
    return p;
}

}  // namespace ulwaves
