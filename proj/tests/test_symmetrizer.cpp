#include <gtest/gtest.h>

#include <cmath>

#include "ulwaves/symmetrizer.hpp"

using namespace ulwaves;

namespace {

DnoParams dno40()
{
    DnoParams p;
    p.zpoints = 40;
    return p;
}

Frequency freq(double a) { return (Frequency(1) << a).finished(); }
Frequency freq(double a, double b) { return (Frequency(2) << a, b).finished(); }

}  // namespace

TEST(GoodUnknowns, RestIsZero)
{
    const auto g = make_grid({2 * M_PI}, {32});
    WaterWaveModel m(g, {}, dno40());
    SurfaceState s{RealField::Zero(32), RealField::Zero(32)};
    const GoodUnknowns gu = good_unknowns(g, s.eta, trace_velocities(m, s), 2.0);
    EXPECT_EQ(gu.Us[0].abs().maxCoeff(), 0.0);
    EXPECT_EQ(gu.zeta_s[0].abs().maxCoeff(), 0.0);
}

TEST(GoodUnknowns, FlatSurfaceIsBracketOfV)
{
    const auto g = make_grid({2 * M_PI}, {32});
    WaterWaveModel m(g, {}, dno40());
    const RealField x = g.coordinate(0);
    SurfaceState s{RealField::Zero(32), RealField(x.sin() + 0.5 * (3 * x).cos())};
    const GoodUnknowns gu = good_unknowns(g, s.eta, trace_velocities(m, s), 2.0);
    const RealField expect = 2 * x.cos() - 10 * 1.5 * (3 * x).sin();
    EXPECT_LT((gu.Us[0] - expect).abs().maxCoeff(), 1e-12);
}

TEST(GoodUnknowns, MatchesTruncatedSeriesOracle)
{
    const int n = 64;
    const auto g = make_grid({2 * M_PI}, {n});
    WaterWaveModel m(g, {}, dno40());
    const RealField x = g.coordinate(0);
    SurfaceState s{RealField(0.05 * x.cos()), RealField(x.sin())};
    const TraceFields tr = trace_velocities(m, s);
    const CutoffPair cut = CutoffPair::smooth();
    const GoodUnknowns gu = good_unknowns(g, s.eta, tr, 2.0, cut);

    // zeta = -0.05 sin x has modes +-1 only; sum the pair series by hand.
    FourierTransform ft(g);
    ComplexField Bh = ft.forward(tr.B);
    for (int i = 0; i < n; ++i) {
        const double k = g.wavenumber(0)(i);
        Bh(i) *= (1 + k * k);
    }
    const ComplexField Vh = ft.forward(tr.V[0]);
    ComplexField out = ComplexField::Zero(n);
    const Complex zh[2] = {Complex(0, 0.025) , Complex(0, -0.025)};  // coefficients of e^{ix}, e^{-ix} in -0.05 sin x
    for (int i = 0; i < n; ++i) {
        const double k = g.wavenumber(0)(i);
        out(i) += (1 + k * k) * Vh(i) / double(n);
        for (int sgn = 0; sgn < 2; ++sgn) {
            const double mz = sgn == 0 ? 1.0 : -1.0;
            const double w = cut.weight(1.0, std::abs(k));
            if (w == 0.0) continue;
            const int target = (i + (sgn == 0 ? 1 : n - 1)) % n;
            if (std::abs(k + mz) > n / 2 - 1) continue;
            out(target) += zh[sgn] * w * Bh(i) / double(n);
        }
    }
    RealField oracle = RealField::Zero(n);
    for (int j = 0; j < n; ++j) {
        Complex acc = 0;
        for (int i = 0; i < n; ++i) acc += out(i) * std::exp(Complex(0, g.wavenumber(0)(i) * x(j)));
        oracle(j) = acc.real();
    }
    EXPECT_LT((gu.Us[0] - oracle).abs().maxCoeff(), 1e-10);
}

TEST(SymmetrizerSymbols, RestValues)
{
    const auto g = make_grid({2 * M_PI}, {16});
    const RealField a = RealField::Constant(16, 9.81), eta = RealField::Zero(16);
    for (double k : {1.0, 3.0, -5.0}) {
        const SymbolPair p = symmetrizer_symbols(g, a, eta, freq(k));
        EXPECT_LT((p.gamma - std::sqrt(9.81 * std::abs(k))).abs().maxCoeff(), 1e-14);
        EXPECT_LT((p.q - std::sqrt(9.81 / std::abs(k))).abs().maxCoeff(), 1e-14);
    }
    const SymbolPair p1 = symmetrizer_symbols(g, a, eta, freq(2));
    const SymbolPair p4 = symmetrizer_symbols(g, RealField(4 * a), eta, freq(2));
    EXPECT_LT((p4.gamma - 2 * p1.gamma).abs().maxCoeff(), 1e-14);
    EXPECT_LT((p4.q - 2 * p1.q).abs().maxCoeff(), 1e-14);
}

TEST(SymmetrizerSymbols, TaylorSignGuard)
{
    const auto g = make_grid({2 * M_PI}, {16});
    const RealField x = g.coordinate(0);
    const RealField a = 1 + x.cos();
    EXPECT_THROW(symmetrizer_symbols(g, RealField(a - a.minCoeff()), RealField::Zero(16), freq(1)), TaylorSignViolation);
    EXPECT_THROW(q_symbol(g, RealField(-a), RealField::Zero(16)), TaylorSignViolation);
}

TEST(SymmetrizerSymbols, DefinitionConsistency2D)
{
    const auto g = make_grid({2 * M_PI, 2 * M_PI}, {16, 16});
    const RealField x = g.coordinate(0), y = g.coordinate(1);
    const RealField eta = 0.1 * (x + 2 * y).cos(), a = 1 + 0.2 * x.sin() * y.cos();
    for (int i = 0; i < g.size(); ++i) {
        const Frequency xi = g.frequency(i);
        if (xi.squaredNorm() == 0) continue;
        const SymbolPair p = symmetrizer_symbols(g, a, eta, xi);
        const RealField lam = dno_principal_symbol(g, eta, xi);
        EXPECT_LT((p.gamma * p.q - a).abs().maxCoeff(), 1e-12);
        EXPECT_LT(((p.gamma / p.q - lam) / lam).abs().maxCoeff(), 1e-12);
    }
}

TEST(ThetaS, ZeroAndRestReduction)
{
    const auto g = make_grid({2 * M_PI}, {32});
    const RealField x = g.coordinate(0);
    const ParaSymbol q = q_symbol(g, RealField::Constant(32, 2.0), RealField::Zero(32));
    EXPECT_EQ(theta_s(g, {RealField::Zero(32)}, q)[0].abs().maxCoeff(), 0.0);
    for (int k : {1, 3, 7}) {
        const RealField u = (k * x).cos();
        const RealField t = theta_s(g, {u}, q)[0];
        EXPECT_LT((t - std::sqrt(2.0 / k) * u).abs().maxCoeff(), 1e-13);
    }
}

TEST(ThetaS, FactorizedRouteAgrees)
{
    const auto g = make_grid({2 * M_PI}, {64});
    const RealField x = g.coordinate(0);
    const RealField a = 1 + 0.3 * x.cos();
    const RealField z = (5 * x).sin() + 0.2 * (11 * x).cos() + 0.1 * (20 * x).sin();
    for (const CutoffPair& cut : {CutoffPair::smooth(), CutoffPair::dyadic()}) {
        const RealField direct = theta_s(g, {z}, q_symbol(g, a, RealField::Zero(64)), cut)[0];
        const RealField dz = fourier_multiplier(g, z, [](const Frequency& k) {
            const double r = std::abs(k[0]);
            return Complex(r == 0 ? 0.0 : 1 / std::sqrt(r), 0);
        });
        const RealField factored = paraproduct(g, RealField(a.sqrt()), dz, cut);
        EXPECT_LT((direct - factored).abs().maxCoeff(), 1e-8);
    }
}

TEST(Decoupling, Examples)
{
    DecouplingPair p = decoupling_symbols(1.0, freq(0.0), freq(1.0));
    EXPECT_NEAR(p.a.real(), -1.0, 1e-15);
    EXPECT_NEAR(p.A.real(), 1.0, 1e-15);
    EXPECT_EQ(p.a.imag(), 0.0);
    const double h = 0.7;
    p = decoupling_symbols(h * h, freq(0.0), freq(-3.0));
    EXPECT_NEAR(p.a.real(), -3 * h, 1e-14);
    EXPECT_NEAR(p.A.real(), 3 * h, 1e-14);
    p = decoupling_symbols(1.0, freq(1, 0), freq(1, 0));
    EXPECT_NEAR(std::abs(p.a - Complex(-std::sqrt(3.0), -1) / 2.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(p.A - Complex(std::sqrt(3.0), -1) / 2.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(p.a + p.A - Complex(0, -1)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(p.a * p.A + 1.0), 0.0, 1e-15);
    EXPECT_THROW(decoupling_symbols(0.25, freq(1.0), freq(1.0)), EllipticityError);
}

TEST(Decoupling, VietaAndSignsFromStraightenedTraces)
{
    const auto g = make_grid({2 * M_PI, 2 * M_PI}, {16, 16});
    const RealField x = g.coordinate(0), y = g.coordinate(1);
    const RealField eta = 0.15 * (x + y).cos() + 0.05 * (2 * y).sin();
    const StraightenedDomain d = straighten(g, eta, 1.0, 0.1, 16, BottomMode::flat);
    for (int i = 0; i < g.size(); ++i) {
        const Frequency xi = g.frequency(i);
        const double x2 = xi.squaredNorm();
        if (x2 == 0) continue;
        for (int p = 0; p < g.size(); ++p) {
            const double al = d.alpha(p, 0);
            const Frequency be = freq(d.beta[0](p, 0), d.beta[1](p, 0));
            const DecouplingPair r = decoupling_symbols(al, be, xi);
            ASSERT_LT(std::abs(r.a + r.A - Complex(0, -be.dot(xi))) / std::sqrt(x2), 1e-12);
            ASSERT_LT(std::abs(r.a * r.A + al * x2) / x2, 1e-12);
            ASSERT_LT(r.a.real(), 0.0);
            ASSERT_GT(r.A.real(), 0.0);
        }
    }
}

TEST(SymmetrizedEnergy, RestAndScaling)
{
    const auto g = make_grid({4.0}, {64});
    const PartitionOfUnity pou(g);
    const RealField x = g.coordinate(0);
    SymmetrizedPair p{{RealField::Zero(64)}, {RealField::Zero(64)}, 2.0};
    EXPECT_EQ(symmetrized_energy(p, pou).total, 0.0);
    p.Us[0] = (2 * M_PI * x / 4).sin();
    p.theta_s[0] = 1 + 0 * x;
    const double e1 = symmetrized_energy(p, pou).total;
    p.Us[0] *= 2;
    p.theta_s[0] *= 2;
    EXPECT_NEAR(symmetrized_energy(p, pou).total / e1, 4.0, 1e-12);
}

TEST(SymmetrizedEnergy, LinearStandingWaveBand)
{
    const int n = 256;
    const auto g = make_grid({2 * M_PI}, {n});
    DnoParams dp;
    dp.zpoints = 48;
    WaterWaveModel m(g, {}, dp);
    const PartitionOfUnity pou(g);
    const RealField x = g.coordinate(0);
    const double k = 4, w = std::sqrt(k * std::tanh(k)), eps = 1e-3;
    double lo = 1e300, hi = 0;
    for (int i = 0; i < 16; ++i) {
        const double t = 2 * M_PI / w * i / 16.0;
        SurfaceState s{RealField(eps * (k * x).cos() * std::cos(w * t)),
                       RealField(-eps / w * (k * x).cos() * std::sin(w * t)), t};
        const double e = symmetrized_energy(symmetrize(m, s, 2.0), pou).total;
        lo = std::min(lo, e);
        hi = std::max(hi, e);
    }
    EXPECT_LT((hi - lo) / hi, 0.05);
}
