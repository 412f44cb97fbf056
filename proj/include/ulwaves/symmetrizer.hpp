#pragma once

#include <complex>
#include <stdexcept>
#include <utility>

#include "ulwaves/dirichlet_neumann.hpp"
#include "ulwaves/paradiff.hpp"
#include "ulwaves/ul_spaces.hpp"
#include "ulwaves/water_waves.hpp"

namespace ulwaves {

class EllipticityError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct GoodUnknowns {
    VectorField Us;
    VectorField zeta_s;
};

struct SymmetrizedPair {
    VectorField Us;
    VectorField theta_s;
    double s = 0.0;
};

struct SymbolPair {
    RealField gamma;
    RealField q;
};

struct DecouplingPair {
    Complex a;
    Complex A;
};

struct EnergySplit {
    double Us = 0.0;
    double theta = 0.0;
    double total = 0.0;
};

// U_s = <D>^s V + T_zeta <D>^s B, zeta_s = <D>^s grad eta.
GoodUnknowns good_unknowns(const PeriodicGrid& grid, const RealField& eta, const TraceFields& tr, double s,
                           const CutoffPair& cut = {});

// gamma = sqrt(a lambda), q = sqrt(a / lambda) at every node for one xi != 0.
SymbolPair symmetrizer_symbols(const PeriodicGrid& grid, const RealField& a, const RealField& eta, const Frequency& xi);
ParaSymbol q_symbol(const PeriodicGrid& grid, const RealField& a, const RealField& eta);
VectorField theta_s(const PeriodicGrid& grid, const VectorField& zeta_s, const ParaSymbol& q, const CutoffPair& cut = {});

// Roots of tau^2 + i(beta.xi) tau - alpha|xi|^2, Re a < 0 < Re A.
DecouplingPair decoupling_symbols(double alpha, const Frequency& beta, const Frequency& xi);

EnergySplit symmetrized_energy(const SymmetrizedPair& pair, const PartitionOfUnity& pou);

// traces -> a -> (U_s, theta_s) for one state.
SymmetrizedPair symmetrize(WaterWaveModel& m, const SurfaceState& state, double s, const CutoffPair& cut = {});

}  // namespace ulwaves
