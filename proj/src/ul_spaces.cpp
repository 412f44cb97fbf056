#include "ulwaves/ul_spaces.hpp"

#include "ulwaves/cutoffs.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ulwaves {

double window_profile(WindowShape shape, double x)
{
    const double ax = std::abs(x);
    double flat = 0.55, edge = 0.95;
    if (shape == WindowShape::steep) {
        flat = 0.75;
        edge = 0.85;
    }
    return smoothstep((edge - ax) / (edge - flat));
}

namespace {

// Periodized one-dimensional bump centered at c on a circle of length L.
RealField periodic_bump(const RealField& x, double c, double L, WindowShape shape)
{
    RealField out = RealField::Zero(x.size());
    const int images = static_cast<int>(std::ceil(1.0 / L)) + 1;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        double v = 0.0;
        for (int m = -images; m <= images; ++m) v += window_profile(shape, x(i) - c - m * L);
        out(i) = v;
    }
    return out;
}

}  // namespace

PartitionOfUnity::PartitionOfUnity(const PeriodicGrid& grid, WindowShape shape) : grid_(grid)
{
    std::vector<std::vector<double>> axis_centers(grid.dims());
    std::vector<std::vector<RealField>> axis_bumps(grid.dims());
    for (int a = 0; a < grid.dims(); ++a) {
        const int nc = static_cast<int>(std::ceil(grid.length(a) - 1e-12));
        const RealField x = grid.coordinate(a);
        for (int q = 0; q < nc; ++q) {
            axis_centers[a].push_back(q);
            axis_bumps[a].push_back(periodic_bump(x, q, grid.length(a), shape));
        }
    }
    if (grid.dims() == 1) {
        for (std::size_t q = 0; q < axis_bumps[0].size(); ++q) {
            windows_.push_back(axis_bumps[0][q]);
            centers_.push_back({axis_centers[0][q]});
        }
    } else {
        for (std::size_t q1 = 0; q1 < axis_bumps[1].size(); ++q1)
            for (std::size_t q0 = 0; q0 < axis_bumps[0].size(); ++q0) {
                windows_.push_back(axis_bumps[0][q0] * axis_bumps[1][q1]);
                centers_.push_back({axis_centers[0][q0], axis_centers[1][q1]});
            }
    }
    normalizer_ = RealField::Zero(grid.size());
    for (const auto& w : windows_) normalizer_ += w;
    for (auto& w : windows_) w /= normalizer_;
}

std::vector<double> windowed_norms(const RealField& u, double s, const PartitionOfUnity& pou)
{
    check_size(pou.grid(), u.size(), "ul_sobolev_norm");
    std::vector<double> out;
    out.reserve(pou.count());
    for (std::size_t q = 0; q < pou.count(); ++q) out.push_back(sobolev_norm(pou.grid(), RealField(pou.window(q) * u), s));
    return out;
}

double ul_sobolev_norm(const RealField& u, double s, const PartitionOfUnity& pou)
{
    const auto n = windowed_norms(u, s, pou);
    return *std::max_element(n.begin(), n.end());
}

double ul_sobolev_norm(const ComplexField& u, double s, const PartitionOfUnity& pou)
{
    check_size(pou.grid(), u.size(), "ul_sobolev_norm");
    double best = 0.0;
    for (std::size_t q = 0; q < pou.count(); ++q) {
        const double re = sobolev_norm(pou.grid(), RealField(pou.window(q) * u.real()), s);
        const double im = sobolev_norm(pou.grid(), RealField(pou.window(q) * u.imag()), s);
        best = std::max(best, std::hypot(re, im));
    }
    return best;
}

double ul_sobolev_norm(const VectorField& u, double s, const PartitionOfUnity& pou)
{
    double best = 0.0;
    for (std::size_t q = 0; q < pou.count(); ++q) {
        double acc = 0.0;
        for (const auto& c : u) {
            check_size(pou.grid(), c.size(), "ul_sobolev_norm");
            const double v = sobolev_norm(pou.grid(), RealField(pou.window(q) * c), s);
            acc += v * v;
        }
        best = std::max(best, std::sqrt(acc));
    }
    return best;
}

DyadicDecomposition::DyadicDecomposition(const PeriodicGrid& grid) : grid_(grid)
{
    const double kmax = grid.max_wavenumber_norm();
    jmax_ = std::max(0, static_cast<int>(std::ceil(std::log2(kmax) - 1e-12)));
    const RealField& r = grid.wavenumber_norm();
    blocks_.push_back(r.unaryExpr([](double x) { return lowpass_profile(2.0 * x); }));
    for (int j = 0; j <= jmax_; ++j) {
        const double sc = std::ldexp(1.0, -j);
        blocks_.push_back(r.unaryExpr([sc](double x) { return annulus_profile(sc * x); }));
    }
}

const RealField& DyadicDecomposition::block_multiplier(int j) const
{
    if (j < -1 || j > jmax_) {
        std::ostringstream os;
        os << "block index " << j << " outside [-1, " << jmax_ << "]";
        throw BlockIndexError(os.str());
    }
    return blocks_[j + 1];
}

RealField DyadicDecomposition::lowpass_multiplier(int j) const
{
    if (j <= -1) return RealField::Zero(grid_.size());
    const double sc = std::ldexp(1.0, -(j - 1));
    return grid_.wavenumber_norm().unaryExpr([sc](double x) { return lowpass_profile(sc * x); });
}

RealField dyadic_block(const RealField& u, int j, const DyadicDecomposition& dd)
{
    return fourier_multiplier(dd.grid(), u, dd.block_multiplier(j).cast<Complex>().eval());
}

ComplexField dyadic_block(const ComplexField& u, int j, const DyadicDecomposition& dd)
{
    return fourier_multiplier(dd.grid(), u, dd.block_multiplier(j).cast<Complex>().eval());
}

RealField lowpass(const RealField& u, int j, const DyadicDecomposition& dd)
{
    return fourier_multiplier(dd.grid(), u, dd.lowpass_multiplier(j).cast<Complex>().eval());
}

std::vector<double> block_l2_norms(const RealField& u, const DyadicDecomposition& dd)
{
    const PeriodicGrid& g = dd.grid();
    check_size(g, u.size(), "block_l2_norms");
    FourierTransform ft(g);
    const RealField p = ft.forward(u).abs2();
    const double n = static_cast<double>(g.size());
    std::vector<double> out;
    for (int j = -1; j <= dd.jmax(); ++j) {
        const RealField w = dd.block_multiplier(j).square() * p;
        out.push_back(std::sqrt(pairwise_sum(w) * g.volume() / (n * n)));
    }
    return out;
}

double zygmund_norm(const RealField& u, double sigma, const DyadicDecomposition& dd)
{
    double best = 0.0;
    for (int j = -1; j <= dd.jmax(); ++j) {
        const double m = dyadic_block(u, j, dd).abs().maxCoeff();
        best = std::max(best, std::pow(2.0, j * sigma) * m);
    }
    return best;
}

}  // namespace ulwaves
