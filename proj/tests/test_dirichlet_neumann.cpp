#include "ulwaves/dirichlet_neumann.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace ulwaves;

namespace {
constexpr double pi = std::numbers::pi;

RealField random_band(const PeriodicGrid& g, int kmax, double amp, std::mt19937& rng)
{
    std::normal_distribution<double> n;
    const RealField x = g.coordinate(0);
    RealField u = RealField::Zero(g.size());
    for (int k = 1; k <= kmax; ++k) u += (n(rng) * (k * x).cos() + n(rng) * (k * x).sin()) / (k * k);
    return amp * u / u.abs().maxCoeff();
}

// Flat-strip multiplier |k| tanh(h|k|) applied spectrally.
RealField g0(const PeriodicGrid& g, const RealField& u, double h)
{
    return fourier_multiplier<double>(g, u, [h](const Frequency& xi) { return Complex(xi.norm() * std::tanh(h * xi.norm())); });
}
}  // namespace

TEST(Chebyshev, DifferentiatesPolynomialsExactly)
{
    const auto c = chebyshev_column(12);
    const Eigen::VectorXd f = c.z.array().pow(5) - 2 * c.z.array().square();
    const Eigen::VectorXd df = 5 * c.z.array().pow(4) - 4 * c.z.array();
    const Eigen::VectorXd d2f = 20 * c.z.array().pow(3) - 4.0;
    EXPECT_LT((c.D * f - df).cwiseAbs().maxCoeff(), 1e-11);
    EXPECT_LT((c.D2 * f - d2f).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_DOUBLE_EQ(c.z(0), 0.0);
    EXPECT_DOUBLE_EQ(c.z(12), -1.0);
    EXPECT_NEAR(clenshaw_curtis_weights(12).dot(f), -1.0 / 6 - 2.0 / 3, 1e-14);
}

TEST(Gmres, StagnationOnSingularSystemThrows)
{
    const Eigen::VectorXd d = (Eigen::VectorXd(4) << 1, 2, 0, 3).finished();
    auto op = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) { y = d.cwiseProduct(x); };
    auto id = [](const Eigen::VectorXd& x, Eigen::VectorXd& y) { y = x; };
    GmresOptions o;
    o.restart = 3;
    try {
        gmres(op, id, Eigen::VectorXd::Ones(4), o);
        FAIL() << "expected SolverError";
    } catch (const SolverError& e) {
        EXPECT_NE(std::string(e.what()).find("stagnated"), std::string::npos);
        EXPECT_NEAR(e.residual_history.back(), 0.5, 1e-12);
    }
}

TEST(Gmres, SolvesAndReportsFailure)
{
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(50, 50);
    std::mt19937 rng(1);
    std::normal_distribution<double> n;
    for (int i = 0; i < 50; ++i)
        for (int j = 0; j < 50; ++j) A(i, j) += 0.05 * n(rng);
    const Eigen::VectorXd b = Eigen::VectorXd::Ones(50);
    auto op = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) { y = A * x; };
    auto id = [](const Eigen::VectorXd& x, Eigen::VectorXd& y) { y = x; };
    GmresOptions o;
    o.restart = 10;
    const auto r = gmres(op, id, b, o);
    EXPECT_LT((A * r.x - b).norm() / b.norm(), 1e-10);
    o.max_iter = 2;
    try {
        gmres(op, id, b, o);
        FAIL();
    } catch (const SolverError& e) {
        EXPECT_EQ(e.residual_history.size(), 3u);
    }
}

TEST(Straighten, ZeroSurface)
{
    const auto g = make_grid({2 * pi}, {16});
    for (auto mode : {BottomMode::flat, BottomMode::following}) {
        const auto d = straighten(g, RealField::Zero(16), 1.0, 0.1, 8, mode);
        for (int j = 0; j <= 8; ++j) {
            EXPECT_LT((d.rho.col(j).array() - d.column.z(j)).abs().maxCoeff(), 1e-15);
            EXPECT_LT((d.rho_z.array() - 1.0).abs().maxCoeff(), 1e-15);
            EXPECT_LT((d.alpha.array() - 1.0).abs().maxCoeff(), 1e-15);
            EXPECT_LT(d.beta[0].array().abs().maxCoeff(), 1e-15);
            EXPECT_LT(d.gamma.array().abs().maxCoeff(), 1e-15);
        }
    }
}

TEST(Straighten, ConstantSurfaceUsesBracketMultiplier)
{
    // e^{delta z <D>} acts on constants as e^{delta z} since <0> = 1.
    const auto g = make_grid({2 * pi}, {16});
    const double c = 0.2, delta = 0.1;
    const auto d = straighten(g, RealField::Constant(16, c), 1.0, delta, 8, BottomMode::following);
    for (int j = 0; j <= 8; ++j) {
        const double z = d.column.z(j);
        const double rho = c * ((1 + z) * std::exp(delta * z) - z * std::exp(-delta * (1 + z))) + z;
        EXPECT_NEAR(d.rho(3, j), rho, 1e-14);
        EXPECT_LT(d.beta[0].col(j).cwiseAbs().maxCoeff(), 1e-15);
    }
    EXPECT_LT((d.rho.col(0).array() - c).abs().maxCoeff(), 1e-14);
    EXPECT_LT((d.rho.col(8).array() - (c - 1.0)).abs().maxCoeff(), 1e-14);
}

TEST(Straighten, BoundaryValuesAndBounds)
{
    const auto g = make_grid({2 * pi}, {64});
    std::mt19937 rng(2);
    const RealField eta = random_band(g, 8, 0.2, rng);
    for (auto mode : {BottomMode::flat, BottomMode::following}) {
        const auto d = straighten(g, eta, 1.0, 0.1, 16, mode);
        EXPECT_LT((d.rho.col(0).array() - eta).abs().maxCoeff(), 1e-10);
        const RealField bottom = mode == BottomMode::flat ? RealField::Constant(64, -1.0) : RealField(eta - 1.0);
        EXPECT_LT((d.rho.col(16).array() - bottom).abs().maxCoeff(), 1e-10);
        EXPECT_GE(d.rho_z.minCoeff(), 0.5);
        PlaneField q = PlaneField::Ones(64, 17);
        q.array() += d.grad_rho[0].array().square();
        EXPECT_GE(d.alpha.minCoeff(), 0.25 / (1 + q.maxCoeff() - 1));
    }
    // Flat mode: the bottom is horizontal.
    const auto d = straighten(g, eta, 1.0, 0.1, 16, BottomMode::flat);
    EXPECT_LT(d.grad_rho[0].col(16).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Straighten, FailureAndDeltaHalving)
{
    const auto g = make_grid({2 * pi}, {32});
    const RealField x = g.coordinate(0);
    for (auto mode : {BottomMode::flat, BottomMode::following}) {
        const RealField eta = 0.3 * (4 * x).cos();
        try {
            straighten(g, eta, 1.0, 1.0, 8, mode);
            FAIL();
        } catch (const StraighteningFailure& e) {
            EXPECT_LT(e.min_rho_z, straightening_floor(eta, 1.0, mode));
        }
        DnoParams p;
        p.delta = 1.0;
        p.zpoints = 8;
        p.bottom = mode;
        const auto d = straighten(g, eta, p);
        EXPECT_LT(d.delta, 1.0);
        EXPECT_GE(d.rho_z.minCoeff(), straightening_floor(eta, 1.0, mode));
    }
}

TEST(Straighten, CoefficientsMatchFiniteDifferences)
{
    const auto g = make_grid({2 * pi}, {64});
    const RealField x = g.coordinate(0);
    const double delta = 0.1, eps = 0.05, h = 1.0;
    for (auto mode : {BottomMode::flat, BottomMode::following}) {
        const auto d = straighten(g, RealField(eps * x.cos()), h, delta, 12, mode);
        // rho for eta = eps cos x evaluated directly; <1> = sqrt 2.
        auto rho = [&](double xx, double z) {
            const double b = std::sqrt(2.0);
            double r = (1 + z) * std::exp(delta * z * b) * eps * std::cos(xx) + z * h;
            if (mode == BottomMode::following) r -= z * std::exp(-delta * (1 + z) * b) * eps * std::cos(xx);
            return r;
        };
        const double e = 1e-3;
        for (int i = 0; i < 64; i += 7)
            for (int j = 1; j < 12; ++j) {
                const double xx = x(i), z = d.column.z(j);
                auto f = [&](double a, double b) { return rho(xx + a, z + b); };
                const double rz = (f(0, -2 * e) - 8 * f(0, -e) + 8 * f(0, e) - f(0, 2 * e)) / (12 * e);
                const double rx = (f(-2 * e, 0) - 8 * f(-e, 0) + 8 * f(e, 0) - f(2 * e, 0)) / (12 * e);
                const double rzz = (-f(0, 2 * e) + 16 * f(0, e) - 30 * f(0, 0) + 16 * f(0, -e) - f(0, -2 * e)) / (12 * e * e);
                const double rxx = (-f(2 * e, 0) + 16 * f(e, 0) - 30 * f(0, 0) + 16 * f(-e, 0) - f(-2 * e, 0)) / (12 * e * e);
                const double rxz = (f(e, e) - f(e, -e) - f(-e, e) + f(-e, -e)) / (4 * e * e);
                const double q = 1 + rx * rx;
                const double al = rz * rz / q, be = -2 * rz * rx / q;
                const double ga = (rzz + al * rxx + be * rxz) / rz;
                EXPECT_NEAR(d.alpha(i, j), al, 1e-8);
                EXPECT_NEAR(d.beta[0](i, j), be, 1e-8);
                EXPECT_NEAR(d.gamma(i, j), ga, 1e-6);
            }
    }
}

TEST(SolveLaplace, FlatStripHarmonic)
{
    const auto g = make_grid({2 * pi}, {32});
    const RealField x = g.coordinate(0);
    const auto d = straighten(g, RealField::Zero(32), 1.0, 0.1, 24);
    for (int k : {1, 3, 7}) {
        const PlaneField phi = solve_laplace(d, RealField((k * x).cos()), nullptr);
        for (int j = 0; j <= 24; ++j) {
            const double z = d.column.z(j);
            const RealField ex = (k * x).cos() * std::cosh(k * (z + 1)) / std::cosh(k);
            EXPECT_LT((phi.col(j).array() - ex).abs().maxCoeff(), 1e-11);
        }
    }
}

TEST(SolveLaplace, ConstantsAreSolutions)
{
    const auto g = make_grid({2 * pi}, {32});
    std::mt19937 rng(3);
    const RealField eta = random_band(g, 6, 0.2, rng);
    for (auto mode : {BottomMode::flat, BottomMode::following}) {
        DnoParams p;
        p.bottom = mode;
        const auto d = straighten(g, eta, p);
        const PlaneField phi = solve_laplace(d, RealField::Ones(32), nullptr, p);
        EXPECT_LT((phi.array() - 1.0).abs().maxCoeff(), 1e-12);
    }
}

TEST(SolveLaplace, QuadraticSource)
{
    const auto g = make_grid({2 * pi}, {16});
    const auto d = straighten(g, RealField::Zero(16), 1.0, 0.1, 10);
    const PlaneField F = PlaneField::Constant(16, 11, -2.0);
    const PlaneField phi = solve_laplace(d, RealField::Zero(16), &F);
    for (int j = 0; j <= 10; ++j) {
        const double z = d.column.z(j);
        EXPECT_LT((phi.col(j).array() - (1 - (z + 1) * (z + 1))).abs().maxCoeff(), 1e-12);
    }
}

TEST(SolveLaplace, ResidualBelowTolerance)
{
    const auto g = make_grid({2 * pi}, {64});
    std::mt19937 rng(4);
    const RealField eta = random_band(g, 8, 0.2, rng), psi = random_band(g, 12, 1.0, rng);
    DnoParams p;
    const auto d = straighten(g, eta, p);
    LaplaceSolver s(d, p);
    const PlaneField phi = s.solve(psi);
    EXPECT_LE(s.last_stats().residual_history.back(), 1e-10);
    const PlaneField r = s.apply_operator(phi);
    EXPECT_LT(r.middleCols(1, p.zpoints - 1).cwiseAbs().maxCoeff(), 1e-7);
    EXPECT_LT(s.conormal(phi, p.zpoints).abs().maxCoeff(), 1e-7);
}

TEST(DirichletNeumann, FlatStripMultiplier)
{
    const auto g = make_grid({2 * pi}, {64});
    const RealField x = g.coordinate(0);
    DnoParams p;
    p.zpoints = 40;
    DnoSolver s(g, p);
    s.set_surface(RealField::Zero(64));
    for (int k = 1; k <= 16; ++k) {
        const RealField G = s.apply(RealField((k * x).cos()));
        const double m = k * std::tanh(k);
        EXPECT_LT((G - m * (k * x).cos()).abs().maxCoeff() / m, 1e-8) << k;
    }
    p.h = 0.5;
    const RealField G = dirichlet_neumann(g, RealField::Zero(64), RealField((3 * x).sin()), p);
    EXPECT_LT((G - 3 * std::tanh(1.5) * (3 * x).sin()).abs().maxCoeff(), 1e-9);
}

TEST(DirichletNeumann, ConstantsAnnihilated)
{
    const auto g = make_grid({2 * pi}, {32});
    std::mt19937 rng(5);
    const RealField eta = random_band(g, 6, 0.2, rng);
    EXPECT_LT(dirichlet_neumann(g, eta, RealField::Constant(32, 2.5)).abs().maxCoeff(), 1e-12);
}

TEST(DirichletNeumann, ShapeDerivativeExpansion)
{
    // G(eps eta) psi = G0 psi + eps (-(eta psi')' - G0(eta G0 psi)) + O(eps^2).
    const auto g = make_grid({2 * pi}, {64});
    const RealField x = g.coordinate(0);
    const RealField psi = x.cos();
    std::vector<double> err;
    for (double eps : {0.05, 0.025, 0.0125}) {
        const RealField eta = eps * x.cos();
        const RealField lin = g0(g, psi, 1.0) - spectral_derivative(g, RealField(eta * spectral_derivative(g, psi, 0)), 0) -
                              g0(g, RealField(eta * g0(g, psi, 1.0)), 1.0);
        err.push_back((dirichlet_neumann(g, eta, psi) - lin).abs().maxCoeff());
    }
    EXPECT_LT(err[0], 0.05 * 0.05 * 2);
    EXPECT_NEAR(std::log2(err[0] / err[1]), 2.0, 0.1);
    EXPECT_NEAR(std::log2(err[1] / err[2]), 2.0, 0.1);
}

TEST(DirichletNeumann, IndependentOfDelta)
{
    const auto g = make_grid({2 * pi}, {64});
    std::mt19937 rng(6);
    const RealField eta = random_band(g, 6, 0.15, rng), psi = random_band(g, 10, 1.0, rng);
    DnoParams a, b;
    b.delta = 0.05;
    EXPECT_LT((dirichlet_neumann(g, eta, psi, a) - dirichlet_neumann(g, eta, psi, b)).abs().maxCoeff(), 1e-8);
}

TEST(DirichletNeumann, SymmetricPositive)
{
    for (auto mode : {BottomMode::flat, BottomMode::following}) {
        const auto g = make_grid({2 * pi}, {64});
        std::mt19937 rng(7);
        DnoParams p;
        p.bottom = mode;
        for (int trial = 0; trial < 5; ++trial) {
            const RealField eta = random_band(g, 6, 0.2, rng);
            const RealField p1 = random_band(g, 10, 1.0, rng), p2 = random_band(g, 10, 1.0, rng);
            DnoSolver s(g, p);
            s.set_surface(eta);
            const RealField g1 = s.apply(p1), g2 = s.apply(p2);
            EXPECT_LT(std::abs(inner_product(g, g1, p2) - inner_product(g, p1, g2)), 1e-8 * l2_norm(g, p1) * l2_norm(g, p2));
            EXPECT_GE(inner_product(g, p1, g1), -1e-10);
        }
    }
}

TEST(DirichletNeumann, TwoDimensionalFlatAndSymmetry)
{
    const auto g = make_grid({2 * pi, 2 * pi}, {16, 16});
    const RealField x = g.coordinate(0), y = g.coordinate(1);
    DnoParams p;
    p.zpoints = 24;
    const RealField G = dirichlet_neumann(g, RealField::Zero(g.size()), RealField((2 * x + y).cos()), p);
    const double k = std::sqrt(5.0);
    EXPECT_LT((G - k * std::tanh(k) * (2 * x + y).cos()).abs().maxCoeff(), 1e-9);
    const RealField eta = 0.1 * x.cos() * y.sin() + 0.05 * (x + 2 * y).cos();
    DnoSolver s(g, p);
    s.set_surface(eta);
    const RealField a = (x + y).sin() + 0.3 * (2 * x).cos(), b = (x - 2 * y).cos() + 0.2 * y.sin();
    EXPECT_LT(std::abs(inner_product(g, s.apply(a), b) - inner_product(g, a, s.apply(b))), 1e-9);
}

TEST(PrincipalSymbol, Examples)
{
    const auto g1 = make_grid({2 * pi}, {32});
    const RealField x = g1.coordinate(0);
    Frequency xi(1);
    xi << 3.0;
    EXPECT_LT((dno_principal_symbol(g1, RealField(0.3 * x.sin()), xi) - 3.0).abs().maxCoeff(), 1e-14);
    EXPECT_LT((dno_principal_symbol(g1, RealField::Zero(32), xi) - 3.0).abs().maxCoeff(), 1e-14);
    xi << 0.0;
    EXPECT_THROW(dno_principal_symbol(g1, RealField::Zero(32), xi), std::domain_error);

    const auto g2 = make_grid({2 * pi, 2 * pi}, {16, 16});
    const RealField x1 = g2.coordinate(0);
    // grad eta = (1, 0) at x1 = 0 for eta = sin x1.
    Frequency z(2);
    z << 0.0, 1.0;
    EXPECT_NEAR(dno_principal_symbol(g2, RealField(x1.sin()), z)(0), std::sqrt(2.0), 1e-13);
    const auto sym = dno_symbol(g2, RealField(x1.sin()));
    EXPECT_EQ(sym.order, 1.0);
    EXPECT_EQ(sym.regularity, 0.5);
}

TEST(DnoRemainder, FlatAndConstant)
{
    const auto g = make_grid({2 * pi}, {64});
    const RealField x = g.coordinate(0);
    DnoParams p;
    p.zpoints = 40;
    DnoSolver s(g, p);
    for (int k : {1, 2, 4, 8}) {
        const RealField r = dno_remainder(s, RealField::Zero(64), RealField((k * x).cos()));
        EXPECT_LT((r - (k * std::tanh(k) - k) * (k * x).cos()).abs().maxCoeff(), 1e-9);
        EXPECT_LE(r.abs().maxCoeff(), 2 * k * std::exp(-2.0 * k) + 1e-9);
    }
    EXPECT_LT(dno_remainder(s, RealField(0.05 * x.cos()), RealField::Constant(64, 1.0)).abs().maxCoeff(), 1e-12);
}

TEST(DnoRemainder, D1SymbolIsAbsXi)
{
    const auto g = make_grid({2 * pi}, {64});
    const RealField x = g.coordinate(0);
    std::mt19937 rng(8);
    const RealField u = random_band(g, 20, 1.0, rng);
    const RealField t = paradiff_apply(g, dno_symbol(g, RealField(0.05 * x.cos())), u);
    const CutoffPair c;
    const RealField m = fourier_multiplier<double>(g, u, [&](const Frequency& xi) { return Complex(c.psi(xi.norm()) * xi.norm()); });
    EXPECT_LT((t - m).abs().maxCoeff(), 1e-11);
}
