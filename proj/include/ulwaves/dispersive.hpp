#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include "ulwaves/fit.hpp"

namespace ulwaves {

class ResolutionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ProbeConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct ProbeConfig {
    double alpha = 0.5;
    int d = 1;
    std::vector<int> j_range{20, 22, 24, 26};
    double quadrature = 10.0;  // eta step = h^alpha / quadrature, at least 10
    int s_points = 2000;       // intervals on [0, s_max]
    double s_max_factor = 2.0; // s_max = s_max_factor * outer case bound
};

// |s| <= inner: Case 1, |s| >= outer: Case 2, between: the stationary band (Case 3).
struct CaseBounds {
    double inner;
    double outer;
};
CaseBounds case_bounds(double alpha);

void validate(const ProbeConfig& cfg);

// (2 pi h)^{-d} int exp(i h^{-alpha}(s.eta + |eta|^alpha)) phi(|eta|)^2 d eta, with phi the dyadic annulus.
// For d = 2 the value depends on |s| only and s is that radius.
std::complex<double> kernel(double h, const ProbeConfig& cfg, double s);
std::vector<std::complex<double>> kernel(double h, const ProbeConfig& cfg, const std::vector<double>& s);

struct NormReport {
    int j = 0;
    double h = 0.0;
    double norm = 0.0;  // h^{d(1-alpha)} int |K_h(s)| ds
    double mass_case1 = 0.0;
    double mass_case2 = 0.0;
    double mass_case3 = 0.0;
};

NormReport operator_norm(int j, const ProbeConfig& cfg);

struct LossFit {
    LineFit fit;  // log2 norm against j
    std::vector<NormReport> ladder;
};

LossFit loss_exponent_fit(const ProbeConfig& cfg);
// Slope of log2 values against j; needs at least four points.
LineFit loss_exponent_fit(const std::vector<int>& j, const std::vector<double>& norms);

}  // namespace ulwaves
