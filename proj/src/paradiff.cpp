#include "ulwaves/paradiff.hpp"

#include "ulwaves/cutoffs.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ulwaves {

CutoffPair CutoffPair::smooth(double eps1, double eps2)
{
    if (!(0.0 < eps1 && eps1 < eps2 && eps2 < 1.0)) throw std::invalid_argument("cutoff pair needs 0 < eps1 < eps2 < 1");
    CutoffPair c;
    c.kind = Kind::smooth;
    c.eps1 = eps1;
    c.eps2 = eps2;
    return c;
}

CutoffPair CutoffPair::dyadic(int j0)
{
    if (j0 < 2) throw std::invalid_argument("dyadic cutoff pair needs j0 >= 2");
    CutoffPair c;
    c.kind = Kind::dyadic;
    c.j0 = j0;
    c.eps1 = std::ldexp(1.0, -(j0 + 2));
    c.eps2 = std::ldexp(1.0, -(j0 - 1));
    return c;
}

double CutoffPair::psi(double eta) const { return smoothstep(2.0 * eta - 1.0); }

double CutoffPair::theta(double zeta, double eta) const
{
    if (eta <= 0.0) return 0.0;
    if (kind == Kind::smooth) return 1.0 - smoothstep((zeta / eta - eps1) / (eps2 - eps1));
    const double p = psi(eta);
    return p > 0.0 ? weight(zeta, eta) / p : 0.0;
}

double CutoffPair::weight(double zeta, double eta) const
{
    if (kind == Kind::smooth) return theta(zeta, eta) * psi(eta);
    if (eta < 0.5) return 0.0;
    double w = 0.0;
    const int jlo = std::max(0, static_cast<int>(std::floor(std::log2(eta))) - 1);
    for (int j = jlo; j <= jlo + 3; ++j) {
        const double ph = annulus_profile(std::ldexp(eta, -j));
        if (ph == 0.0) continue;
        w += lowpass_profile(std::ldexp(zeta, 1 - (j - j0))) * ph;
    }
    return w;
}

RealField dyadic_lowpass_multiplier(const PeriodicGrid& grid, int m)
{
    return grid.wavenumber_norm().unaryExpr([m](double x) { return lowpass_profile(std::ldexp(x, 1 - m)); });
}

ParaSymbol multiplier_symbol(const PeriodicGrid& grid, std::function<Complex(const Frequency&)> h, double order, bool homogeneous)
{
    ParaSymbol s;
    s.order = order;
    s.regularity = 1.0;
    s.homogeneous = homogeneous;
    const Eigen::Index n = grid.size();
    s.eval = [h = std::move(h), n](const Frequency& xi) { return ComplexField::Constant(n, h(xi)); };
    return s;
}

ParaSymbol product_symbol(const RealField& b, std::function<Complex(const Frequency&)> h, double order, double regularity,
                          bool homogeneous)
{
    ParaSymbol s;
    s.order = order;
    s.regularity = regularity;
    s.homogeneous = homogeneous;
    s.eval = [b, h = std::move(h)](const Frequency& xi) { return (b.cast<Complex>() * h(xi)).eval(); };
    return s;
}

namespace {

struct ModeTable {
    std::vector<int> m0, m1;
};

ModeTable modes(const PeriodicGrid& g)
{
    ModeTable t;
    t.m0.resize(g.size());
    t.m1.assign(g.size(), 0);
    for (Eigen::Index f = 0; f < g.size(); ++f) {
        t.m0[f] = g.mode(0, f);
        if (g.dims() == 2) t.m1[f] = g.mode(1, f);
    }
    return t;
}

bool in_lattice(const PeriodicGrid& g, int n0, int n1)
{
    if (n0 < -g.points(0) / 2 || n0 >= g.points(0) / 2) return false;
    if (g.dims() == 2 && (n1 < -g.points(1) / 2 || n1 >= g.points(1) / 2)) return false;
    return true;
}

double norm_of_modes(const PeriodicGrid& g, int n0, int n1)
{
    const double k0 = 2.0 * std::numbers::pi * n0 / g.length(0);
    if (g.dims() == 1) return std::abs(k0);
    const double k1 = 2.0 * std::numbers::pi * n1 / g.length(1);
    return std::hypot(k0, k1);
}

// out_hat(zeta + eta) += w(zeta, eta) ahat(zeta) / N for one eta.
void scatter(const PeriodicGrid& g, const ModeTable& mt, const ComplexField& ahat, Complex ueta, Eigen::Index feta,
             const CutoffPair& cut, ComplexField& out)
{
    const double eta = g.wavenumber_norm()(feta);
    const double inv_n = 1.0 / static_cast<double>(g.size());
    for (Eigen::Index fz = 0; fz < g.size(); ++fz) {
        const Complex az = ahat(fz);
        if (az == 0.0) continue;
        const double zeta = g.wavenumber_norm()(fz);
        if (zeta >= cut.eps2 * eta) continue;
        const int n0 = mt.m0[fz] + mt.m0[feta];
        const int n1 = mt.m1[fz] + mt.m1[feta];
        if (!in_lattice(g, n0, n1)) continue;
        const double w = cut.weight(zeta, eta);
        if (w == 0.0) continue;
        out(g.flat_index(n0, n1)) += w * az * ueta * inv_n;
    }
}

}  // namespace

ComplexField paraproduct_direct(const PeriodicGrid& grid, const ComplexField& a, const ComplexField& u, const CutoffPair& cut)
{
    check_size(grid, a.size(), "paraproduct");
    check_size(grid, u.size(), "paraproduct");
    FourierTransform ft(grid);
    const ComplexField ah = ft.forward(a), uh = ft.forward(u);
    const ModeTable mt = modes(grid);
    ComplexField out = ComplexField::Zero(grid.size());
    const double tiny = 1e-300;
    for (Eigen::Index fe = 0; fe < grid.size(); ++fe) {
        if (std::abs(uh(fe)) <= tiny || cut.psi(grid.wavenumber_norm()(fe)) == 0.0) continue;
        scatter(grid, mt, ah, uh(fe), fe, cut, out);
    }
    return ft.inverse(out);
}

ComplexField paraproduct_blockwise(const PeriodicGrid& grid, const ComplexField& a, const ComplexField& u, const CutoffPair& cut)
{
    check_size(grid, a.size(), "paraproduct");
    check_size(grid, u.size(), "paraproduct");
    DyadicDecomposition dd(grid);
    ComplexField out = ComplexField::Zero(grid.size());
    for (int j = 0; j <= dd.jmax(); ++j) {
        const ComplexField uj = dyadic_block(u, j, dd);
        const ComplexField sa = fourier_multiplier(grid, a, dyadic_lowpass_multiplier(grid, j - cut.j0).cast<Complex>().eval());
        out += truncated_product(grid, sa, uj);
    }
    return out;
}

ComplexField paraproduct(const PeriodicGrid& grid, const ComplexField& a, const ComplexField& u, const CutoffPair& cut)
{
    if (cut.kind == CutoffPair::Kind::dyadic) return paraproduct_blockwise(grid, a, u, cut);
    return paraproduct_direct(grid, a, u, cut);
}

RealField paraproduct(const PeriodicGrid& grid, const RealField& a, const RealField& u, const CutoffPair& cut)
{
    return paraproduct(grid, a.cast<Complex>().eval(), u.cast<Complex>().eval(), cut).real();
}

ComplexField paradiff_apply(const PeriodicGrid& grid, const ParaSymbol& a, const ComplexField& u, const CutoffPair& cut)
{
    check_size(grid, u.size(), "paradiff_apply");
    FourierTransform ft(grid);
    const ComplexField uh = ft.forward(u);
    const ModeTable mt = modes(grid);
    ComplexField out = ComplexField::Zero(grid.size());
    for (Eigen::Index fe = 0; fe < grid.size(); ++fe) {
        if (std::abs(uh(fe)) <= 1e-300 || cut.psi(grid.wavenumber_norm()(fe)) == 0.0) continue;
        const ComplexField ax = a.eval(grid.frequency(fe));
        check_size(grid, ax.size(), "symbol evaluation");
        scatter(grid, mt, ft.forward(ax), uh(fe), fe, cut, out);
    }
    return ft.inverse(out);
}

RealField paradiff_apply(const PeriodicGrid& grid, const ParaSymbol& a, const RealField& u, const CutoffPair& cut)
{
    return paradiff_apply(grid, a, u.cast<Complex>().eval(), cut).real();
}

ComplexField bony_remainder(const PeriodicGrid& grid, const ComplexField& a, const ComplexField& u, const CutoffPair& cut)
{
    return truncated_product(grid, a, u) - paraproduct(grid, a, u, cut) - paraproduct(grid, u, a, cut);
}

RealField bony_remainder(const PeriodicGrid& grid, const RealField& a, const RealField& u, const CutoffPair& cut)
{
    return bony_remainder(grid, a.cast<Complex>().eval(), u.cast<Complex>().eval(), cut).real();
}

double holder_norm(const PeriodicGrid& grid, const RealField& u, double rho)
{
    const double r = std::round(rho);
    if (std::abs(rho - r) > 1e-12) return zygmund_norm(u, rho, DyadicDecomposition(grid));
    double best = u.abs().maxCoeff();
    std::vector<RealField> level{u};
    for (int k = 1; k <= static_cast<int>(r); ++k) {
        std::vector<RealField> next;
        for (const auto& f : level)
            for (int ax = 0; ax < grid.dims(); ++ax) {
                next.push_back(spectral_derivative(grid, f, ax));
                best = std::max(best, next.back().abs().maxCoeff());
            }
        level = std::move(next);
    }
    return best;
}

namespace {

double complex_holder(const PeriodicGrid& g, const ComplexField& v, double rho)
{
    return std::hypot(holder_norm(g, v.real(), rho), holder_norm(g, v.imag(), rho));
}

int binom(int n, int k)
{
    int r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace

double symbol_seminorm(const PeriodicGrid& grid, const ParaSymbol& a)
{
    if (a.seminorm_cache && a.seminorm_cache->has_value()) return **a.seminorm_cache;
    const int d = grid.dims();
    const int top = 2 * d + 2;
    std::vector<double> step(d);
    for (int ax = 0; ax < d; ++ax) step[ax] = 2.0 * std::numbers::pi / grid.length(ax);
    double best = 0.0;
    for (Eigen::Index f = 0; f < grid.size(); ++f) {
        const double xn = grid.wavenumber_norm()(f);
        if (xn < 0.5) continue;
        const Frequency xi = grid.frequency(f);
        const double br = std::sqrt(1.0 + xn * xn);
        // Multi-indices (p, q) with p + q <= top; q = 0 in one dimension.
        // Differences step away from the origin so they never straddle xi = 0.
        for (int p = 0; p <= top; ++p)
            for (int q = 0; q <= (d == 2 ? top - p : 0); ++q) {
                ComplexField diff = ComplexField::Zero(grid.size());
                for (int i = 0; i <= p; ++i)
                    for (int k = 0; k <= q; ++k) {
                        Frequency z = xi;
                        z(0) += i * (xi(0) < 0 ? -step[0] : step[0]);
                        if (d == 2) z(1) += k * (xi(1) < 0 ? -step[1] : step[1]);
                        const double c = binom(p, i) * binom(q, k) * (((p - i) + (q - k)) % 2 ? -1.0 : 1.0);
                        diff += c * a.eval(z);
                    }
                double h = std::pow(step[0], p);
                if (d == 2) h *= std::pow(step[1], q);
                diff /= h;
                if ((xi(0) < 0 && p % 2) != (d == 2 && xi(1) < 0 && q % 2)) diff = -diff;
                const double v = std::pow(br, p + q - a.order) * complex_holder(grid, diff, a.regularity);
                best = std::max(best, v);
            }
    }
    if (a.seminorm_cache) *a.seminorm_cache = best;
    return best;
}

}  // namespace ulwaves
