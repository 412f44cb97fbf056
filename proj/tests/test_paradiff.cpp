#include "ulwaves/cutoffs.hpp"
#include "ulwaves/paradiff.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace ulwaves;

namespace {
constexpr double pi = std::numbers::pi;

ComplexField expo(const PeriodicGrid& g, int k)
{
    const RealField x = g.coordinate(0);
    ComplexField u(g.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = std::polar(1.0, k * x(i));
    return u;
}

RealField random_band(const PeriodicGrid& g, int kmax, double decay, unsigned seed)
{
    std::mt19937 rng(seed);
    std::normal_distribution<double> n;
    const RealField x = g.coordinate(0);
    RealField u = RealField::Zero(g.size());
    for (int k = 1; k <= kmax; ++k) u += (n(rng) * (k * x).cos() + n(rng) * (k * x).sin()) * std::pow(k, -decay);
    return u;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    const double n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}
}  // namespace

TEST(CutoffPair, AdmissibleStructure)
{
    for (const auto& c : {CutoffPair::smooth(), CutoffPair::dyadic(3)}) {
        for (double eta : {1.0, 3.0, 17.0, 100.0}) {
            EXPECT_DOUBLE_EQ(c.psi(eta), 1.0);
            EXPECT_DOUBLE_EQ(c.theta(0.99 * c.eps1 * eta, eta), 1.0);
            EXPECT_DOUBLE_EQ(c.theta(1.01 * c.eps2 * eta, eta), 0.0);
            for (double r = 0; r < 0.4; r += 0.01) {
                const double t = c.theta(r * eta, eta);
                EXPECT_GE(t, -1e-15);
                EXPECT_LE(t, 1.0 + 1e-15);
            }
        }
        EXPECT_EQ(c.psi(0.5), 0.0);
        EXPECT_EQ(c.psi(0.0), 0.0);
    }
    const auto d = CutoffPair::dyadic(3);
    EXPECT_DOUBLE_EQ(d.eps1, 1.0 / 32);
    EXPECT_DOUBLE_EQ(d.eps2, 1.0 / 4);
}

TEST(Paraproduct, ExponentialPairs)
{
    const auto g = make_grid({2 * pi}, {128});
    for (const auto& cut : {CutoffPair::smooth(), CutoffPair::dyadic(3)}) {
        // |l| <= eps1 |k|
        for (auto [l, k] : std::vector<std::pair<int, int>>{{1, 40}, {-1, 33}, {0, 5}, {2, -60}}) {
            const ComplexField t = paraproduct(g, expo(g, l), expo(g, k), cut);
            EXPECT_LT((t - expo(g, k + l)).abs().maxCoeff(), 1e-13) << l << " " << k;
        }
        // |l| >= eps2 |k|
        for (auto [l, k] : std::vector<std::pair<int, int>>{{9, 30}, {5, 5}, {-12, 12}, {3, 1}}) {
            EXPECT_LT(paraproduct(g, expo(g, l), expo(g, k), cut).abs().maxCoeff(), 1e-14);
        }
        const RealField a = random_band(g, 20, 1.0, 1);
        EXPECT_LT(paraproduct(g, a, RealField(RealField::Constant(g.size(), 3.0)), cut).abs().maxCoeff(), 1e-14);
    }
}

TEST(Paraproduct, DyadicRealizationsAgree)
{
    const auto cut = CutoffPair::dyadic(3);
    for (auto g : {make_grid({2 * pi}, {128}), make_grid({2 * pi, 4.0}, {32, 16})}) {
        std::mt19937 rng(3);
        std::normal_distribution<double> n;
        ComplexField a(g.size()), u(g.size());
        for (auto& v : a) v = Complex(n(rng), n(rng));
        for (auto& v : u) v = Complex(n(rng), n(rng));
        const ComplexField d = paraproduct_direct(g, a, u, cut);
        const ComplexField b = paraproduct_blockwise(g, a, u, cut);
        EXPECT_LT((d - b).abs().maxCoeff(), 1e-8 * d.abs().maxCoeff());
    }
}

TEST(Paraproduct, Linearity)
{
    const auto g = make_grid({2 * pi}, {64});
    const RealField a1 = random_band(g, 20, 1, 1), a2 = random_band(g, 20, 1, 2), u1 = random_band(g, 20, 1, 3),
                    u2 = random_band(g, 20, 1, 4);
    const RealField lhs = paraproduct(g, RealField(2 * a1 - a2), RealField(u1 + 3 * u2));
    const RealField rhs = 2 * paraproduct(g, a1, u1) + 6 * paraproduct(g, a1, u2) - paraproduct(g, a2, u1) - 3 * paraproduct(g, a2, u2);
    EXPECT_LT((lhs - rhs).abs().maxCoeff(), 1e-12);
}

TEST(Paraproduct, FrequencyLocalization)
{
    const auto g = make_grid({2 * pi}, {128});
    const auto cut = CutoffPair::smooth();
    const RealField a = random_band(g, 60, 0.0, 5);
    for (int k : {10, 25, 40}) {
        FourierTransform ft(g);
        const ComplexField th = ft.forward(paraproduct(g, a.cast<Complex>().eval(), expo(g, k), cut));
        for (Eigen::Index f = 0; f < g.size(); ++f) {
            if (std::abs(g.mode(0, f) - k) >= cut.eps2 * k) {
                EXPECT_LT(std::abs(th(f)), 1e-11);
            }
        }
    }
}

TEST(Bony, ExactCancellationAndConstants)
{
    const auto g = make_grid({2 * pi}, {128});
    for (const auto& cut : {CutoffPair::smooth(), CutoffPair::dyadic(3)}) {
        EXPECT_LT(bony_remainder(g, expo(g, 2), expo(g, 50), cut).abs().maxCoeff(), 1e-13);
        EXPECT_LT(bony_remainder(g, expo(g, -1), expo(g, 31), cut).abs().maxCoeff(), 1e-13);
        // Comparable frequencies: both paraproducts vanish.
        EXPECT_LT((bony_remainder(g, expo(g, 1), expo(g, 1), cut) - expo(g, 2)).abs().maxCoeff(), 1e-13);
        // Constant symbol: remainder is c times the psi-lowpass of u (psi(0) = 0 keeps only the mean here).
        const RealField u = random_band(g, 10, 1.0, 9) + 0.7;
        const RealField r = bony_remainder(g, RealField(RealField::Constant(g.size(), 2.0)), u, cut);
        EXPECT_LT((r - 2.0 * 0.7).abs().maxCoeff(), 1e-12);
    }
}

TEST(Bony, RemainderSmoothing)
{
    const auto g = make_grid({2 * pi}, {512});
    DyadicDecomposition dd(g);
    const RealField a = random_band(g, 80, 2.0, 11), u = random_band(g, 80, 2.0, 12);
    const auto nr = block_l2_norms(bony_remainder(g, a, u), dd);
    const auto np = block_l2_norms(truncated_product(g, a, u), dd);
    std::vector<double> j, lr, lp;
    for (int b = 3; b <= 6; ++b) {
        j.push_back(b);
        lr.push_back(std::log2(nr[b + 1]));
        lp.push_back(std::log2(np[b + 1]));
    }
    EXPECT_LT(fit_slope(j, lr), fit_slope(j, lp) - 0.8);
}

TEST(ParadiffApply, MultiplierReduction)
{
    const auto g = make_grid({2 * pi}, {64});
    const auto abs_xi = multiplier_symbol(g, [](const Frequency& xi) { return Complex(xi.norm()); }, 1.0, true);
    EXPECT_LT((paradiff_apply(g, abs_xi, expo(g, 4)) - 4.0 * expo(g, 4)).abs().maxCoeff(), 1e-13);
}

TEST(ParadiffApply, ProductSymbolFactorizes)
{
    const auto g = make_grid({2 * pi}, {128});
    const RealField x = g.coordinate(0);
    const RealField b = 1.0 + 0.3 * x.cos() + 0.1 * (2 * x).sin();
    const auto sym = product_symbol(b, [](const Frequency& xi) { return Complex(xi.norm()); }, 1.0, 1.0, true);
    for (const auto& cut : {CutoffPair::smooth(), CutoffPair::dyadic(3)}) {
        for (int k : {3, 17, 40}) {
            const ComplexField lhs = paradiff_apply(g, sym, expo(g, k), cut);
            const ComplexField rhs = paraproduct(g, b.cast<Complex>().eval(), ComplexField(double(k) * expo(g, k)), cut);
            EXPECT_LT((lhs - rhs).abs().maxCoeff(), 1e-12);
        }
    }
}

TEST(ParadiffApply, CompositionOrderGain)
{
    const auto g = make_grid({2 * pi}, {512});
    const RealField x = g.coordinate(0);
    const RealField b = 1.0 + 0.2 * x.cos();
    const auto a = product_symbol(b, [](const Frequency& xi) { return Complex(xi.norm()); }, 1.0, 1.0, true);
    const auto a2 = product_symbol(RealField(b * b), [](const Frequency& xi) { return Complex(xi.squaredNorm()); }, 2.0, 1.0, true);
    std::vector<double> lk, lr;
    for (int k : {16, 32, 64, 128}) {
        const ComplexField e = expo(g, k);
        const ComplexField t2 = paradiff_apply(g, a2, e);
        const double r = (paradiff_apply(g, a, paradiff_apply(g, a, e)) - t2).matrix().norm() / t2.matrix().norm();
        lk.push_back(std::log(k));
        lr.push_back(std::log(r));
    }
    EXPECT_LE(fit_slope(lk, lr), -1.0 + 0.2);
}

TEST(SymbolSeminorm, Examples)
{
    const auto g = make_grid({2 * pi}, {32});
    const auto br = multiplier_symbol(g, [](const Frequency& xi) { return Complex(std::sqrt(1 + xi.squaredNorm())); }, 1.0, false);
    const double s = symbol_seminorm(g, br);
    EXPECT_TRUE(std::isfinite(s));
    EXPECT_GT(s, 0.9);
    EXPECT_LT(s, 2.0);
    // Cached on second call.
    EXPECT_EQ(symbol_seminorm(g, br), s);

    const RealField x = g.coordinate(0);
    const RealField v = 0.5 + 0.25 * x.cos();
    ParaSymbol vs = product_symbol(v, [](const Frequency& xi) { return Complex(0.0, xi(0)); }, 1.0, 0.5, false);
    ParaSymbol vs2 = product_symbol(RealField(3.0 * v), [](const Frequency& xi) { return Complex(0.0, xi(0)); }, 1.0, 0.5, false);
    const double r = symbol_seminorm(g, vs) / holder_norm(g, v, 0.5);
    EXPECT_GT(r, 0.2);
    EXPECT_LT(r, 5.0);
    EXPECT_NEAR(symbol_seminorm(g, vs2), 3.0 * symbol_seminorm(g, vs), 1e-10);

    const auto zero = multiplier_symbol(g, [](const Frequency&) { return Complex(0.0); }, 0.0, false);
    EXPECT_EQ(symbol_seminorm(g, zero), 0.0);
}
