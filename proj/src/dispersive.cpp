#include "ulwaves/dispersive.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "ulwaves/cutoffs.hpp"

namespace ulwaves {

using Complex = std::complex<double>;

CaseBounds case_bounds(double alpha)
{
    const double e = std::abs(1.0 - alpha);
    return {0.5 * alpha / std::pow(2.0, e), std::pow(2.0, 1.0 + e) * alpha};
}

void validate(const ProbeConfig& cfg)
{
    if (!(cfg.alpha > 0.0) || cfg.alpha == 1.0) throw ProbeConfigError("alpha must be positive and different from 1");
    if (cfg.d != 1 && cfg.d != 2) throw ProbeConfigError("d must be 1 or 2");
    for (std::size_t i = 1; i < cfg.j_range.size(); ++i)
        if (cfg.j_range[i] <= cfg.j_range[i - 1]) throw ProbeConfigError("j_range must be increasing");
    if (cfg.s_points < 16 || !(cfg.s_max_factor >= 1.0)) throw ProbeConfigError("s grid too small");
    if (!(cfg.quadrature >= 10.0)) {
        std::ostringstream os;
        os << "quadrature step h^alpha/" << cfg.quadrature << " does not resolve the phase (needs <= h^alpha/10)";
        throw ResolutionError(os.str());
    }
}

namespace {

// Trapezoid nodes on the support 1/2 <= r <= 2 with weight phi(r)^2 folded in, phase exp(i lam r^alpha) included.
struct RadialRule {
    double r0 = 0.5;
    double dr = 0.0;
    std::vector<Complex> c;
};

RadialRule radial_rule(double h, const ProbeConfig& cfg)
{
    RadialRule q;
    const double lam = std::pow(h, -cfg.alpha);
    const int n = static_cast<int>(std::ceil(1.5 / (std::pow(h, cfg.alpha) / cfg.quadrature)));
    q.dr = 1.5 / n;
    q.c.resize(n + 1);
    for (int i = 0; i <= n; ++i) {
        const double r = q.r0 + i * q.dr;
        const double phi = annulus_profile(r);
        q.c[i] = q.dr * phi * phi * std::polar(1.0, lam * std::pow(r, cfg.alpha));
    }
    return q;
}

// sum_i c_i exp(i t (r0 + i dr)) by Horner in z = exp(i t dr).
Complex horner(const RadialRule& q, double t)
{
    const Complex z = std::polar(1.0, t * q.dr);
    Complex acc = 0.0;
    for (std::size_t i = q.c.size(); i-- > 0;) acc = acc * z + q.c[i];
    return acc * std::polar(1.0, t * q.r0);
}

}  // namespace

std::vector<Complex> kernel(double h, const ProbeConfig& cfg, const std::vector<double>& s)
{
    validate(cfg);
    if (!(h > 0.0)) throw ProbeConfigError("h must be positive");
    const double lam = std::pow(h, -cfg.alpha);
    const RadialRule q = radial_rule(h, cfg);
    std::vector<Complex> out(s.size());
    if (cfg.d == 1) {
        // eta > 0 contributes exp(i lam s r), eta < 0 contributes exp(-i lam s r).
        const double pre = 1.0 / (2.0 * std::numbers::pi * h);
        for (std::size_t k = 0; k < s.size(); ++k) out[k] = pre * (horner(q, lam * s[k]) + horner(q, -lam * s[k]));
        return out;
    }
    const double pre = 1.0 / std::pow(2.0 * std::numbers::pi * h, 2);
    for (std::size_t k = 0; k < s.size(); ++k) {
        const double rho = std::abs(s[k]);
        Complex acc = 0.0;
        for (std::size_t i = 0; i < q.c.size(); ++i) {
            const double r = q.r0 + i * q.dr;
            acc += q.c[i] * r * std::cyl_bessel_j(0.0, lam * rho * r);
        }
        out[k] = pre * 2.0 * std::numbers::pi * acc;
    }
    return out;
}

Complex kernel(double h, const ProbeConfig& cfg, double s) { return kernel(h, cfg, std::vector<double>{s})[0]; }

NormReport operator_norm(int j, const ProbeConfig& cfg)
{
    validate(cfg);
    NormReport rep;
    rep.j = j;
    rep.h = std::ldexp(1.0, -j);
    const CaseBounds cb = case_bounds(cfg.alpha);
    const double smax = cfg.s_max_factor * cb.outer;
    const int n = cfg.s_points;
    const double ds = smax / n;
    std::vector<double> s(n + 1);
    for (int i = 0; i <= n; ++i) s[i] = i * ds;
    const std::vector<Complex> K = kernel(rep.h, cfg, s);
    // |K| is even in s for d = 1; d = 2 uses the radial measure 2 pi s ds.
    for (int i = 0; i <= n; ++i) {
        const double w = (i == 0 || i == n ? 0.5 : 1.0) * ds * (cfg.d == 1 ? 2.0 : 2.0 * std::numbers::pi * s[i]);
        const double m = w * std::abs(K[i]);
        if (s[i] <= cb.inner)
            rep.mass_case1 += m;
        else if (s[i] >= cb.outer)
            rep.mass_case2 += m;
        else
            rep.mass_case3 += m;
    }
    const double scale = std::pow(rep.h, cfg.d * (1.0 - cfg.alpha));
    rep.mass_case1 *= scale;
    rep.mass_case2 *= scale;
    rep.mass_case3 *= scale;
    rep.norm = rep.mass_case1 + rep.mass_case2 + rep.mass_case3;
    return rep;
}

LineFit loss_exponent_fit(const std::vector<int>& j, const std::vector<double>& norms)
{
    if (j.size() < 4 || j.size() != norms.size()) throw ProbeConfigError("the loss fit needs at least four ladder points");
    std::vector<double> x, y;
    for (std::size_t i = 0; i < j.size(); ++i) {
        x.push_back(j[i]);
        y.push_back(std::log2(norms[i]));
    }
    return line_fit(x, y);
}

LossFit loss_exponent_fit(const ProbeConfig& cfg)
{
    validate(cfg);
    if (cfg.j_range.size() < 4) throw ProbeConfigError("the loss fit needs at least four ladder points");
    LossFit out;
    std::vector<double> norms;
    for (int j : cfg.j_range) {
        out.ladder.push_back(operator_norm(j, cfg));
        norms.push_back(out.ladder.back().norm);
    }
    out.fit = loss_exponent_fit(cfg.j_range, norms);
    return out;
}

}  // namespace ulwaves
