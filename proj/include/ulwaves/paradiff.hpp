#pragma once

#include "ulwaves/grid.hpp"
#include "ulwaves/ul_spaces.hpp"

#include <functional>
#include <memory>
#include <optional>

namespace ulwaves {

// Admissible pair (psi, theta). Both kinds share psi(eta) = 1 - lowpass(2|eta|).
// smooth: theta = 1 for |zeta| <= eps1 |eta|, 0 for |zeta| >= eps2 |eta|.
// dyadic: weight sum_{j>=0} S_{j-j0}(zeta) phi_j(eta), realized blockwise.
struct CutoffPair {
    enum class Kind { smooth, dyadic };
    Kind kind = Kind::smooth;
    double eps1 = 0.1;
    double eps2 = 0.2;
    int j0 = 3;

    static CutoffPair smooth(double eps1 = 0.1, double eps2 = 0.2);
    static CutoffPair dyadic(int j0 = 3);

    double psi(double eta) const;
    double theta(double zeta, double eta) const;
    // theta(zeta, eta) psi(eta), arguments are Euclidean norms.
    double weight(double zeta, double eta) const;
};

// Lowpass multiplier lowpass(2^{1-m}|xi|), defined for every integer m.
RealField dyadic_lowpass_multiplier(const PeriodicGrid& grid, int m);

// a(x, xi) sampled at every grid node for a given frequency.
struct ParaSymbol {
    double order = 0.0;
    double regularity = 0.0;
    bool homogeneous = false;
    std::function<ComplexField(const Frequency&)> eval;
    std::shared_ptr<std::optional<double>> seminorm_cache = std::make_shared<std::optional<double>>();
};

ParaSymbol multiplier_symbol(const PeriodicGrid& grid, std::function<Complex(const Frequency&)> h, double order, bool homogeneous);
// b(x) h(xi).
ParaSymbol product_symbol(const RealField& b, std::function<Complex(const Frequency&)> h, double order, double regularity,
                          bool homogeneous);

ComplexField paraproduct_direct(const PeriodicGrid& grid, const ComplexField& a, const ComplexField& u, const CutoffPair& cut);
// Only meaningful for dyadic pairs: sum_j S_{j-j0}(a) Delta_j u.
ComplexField paraproduct_blockwise(const PeriodicGrid& grid, const ComplexField& a, const ComplexField& u, const CutoffPair& cut);

ComplexField paraproduct(const PeriodicGrid& grid, const ComplexField& a, const ComplexField& u, const CutoffPair& cut = {});
RealField paraproduct(const PeriodicGrid& grid, const RealField& a, const RealField& u, const CutoffPair& cut = {});

ComplexField paradiff_apply(const PeriodicGrid& grid, const ParaSymbol& a, const ComplexField& u, const CutoffPair& cut = {});
RealField paradiff_apply(const PeriodicGrid& grid, const ParaSymbol& a, const RealField& u, const CutoffPair& cut = {});

ComplexField bony_remainder(const PeriodicGrid& grid, const ComplexField& a, const ComplexField& u, const CutoffPair& cut = {});
RealField bony_remainder(const PeriodicGrid& grid, const RealField& a, const RealField& u, const CutoffPair& cut = {});

// max over |alpha| <= 2d+2 and lattice |xi| >= 1/2 of <xi>^{|alpha|-m} |d_xi^alpha a(., xi)|_{W^{rho,inf}}.
double symbol_seminorm(const PeriodicGrid& grid, const ParaSymbol& a);
// W^{rho,inf} norm: L^inf and gradient for integer rho <= 1, Zygmund norm otherwise.
double holder_norm(const PeriodicGrid& grid, const RealField& u, double rho);

}  // namespace ulwaves
