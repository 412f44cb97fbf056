#include "ulwaves/grid.hpp"

#include <fftw3.h>

#include <map>
#include <vector>
#include <cmath>
#include <numbers>
#include <sstream>

namespace ulwaves {

PeriodicGrid::PeriodicGrid(std::vector<double> lengths, std::vector<int> points)
    : lengths_(std::move(lengths)), points_(std::move(points))
{
    if (points_.empty() || points_.size() > 2 || lengths_.size() != points_.size())
        throw InvalidGrid("grid must have one or two axes with matching lengths and points");
    size_ = 1;
    for (std::size_t a = 0; a < points_.size(); ++a) {
        if (points_[a] < 8 || points_[a] % 2 != 0) {
            std::ostringstream os;
            os << "axis " << a << ": point count " << points_[a] << " must be even and >= 8";
            throw InvalidGrid(os.str());
        }
        if (!(lengths_[a] > 0.0) || !std::isfinite(lengths_[a])) {
            std::ostringstream os;
            os << "axis " << a << ": period must be positive, got " << lengths_[a];
            throw InvalidGrid(os.str());
        }
        size_ *= points_[a];
    }
    k_.assign(points_.size(), RealField(size_));
    knorm_ = RealField::Zero(size_);
    for (Eigen::Index f = 0; f < size_; ++f) {
        double s = 0.0;
        for (int a = 0; a < dims(); ++a) {
            const double k = 2.0 * std::numbers::pi * mode(a, f) / lengths_[a];
            k_[a](f) = k;
            s += k * k;
        }
        knorm_(f) = std::sqrt(s);
    }
}

double PeriodicGrid::cell_volume() const
{
    double v = 1.0;
    for (int a = 0; a < dims(); ++a) v *= spacing(a);
    return v;
}

double PeriodicGrid::volume() const
{
    double v = 1.0;
    for (double l : lengths_) v *= l;
    return v;
}

int PeriodicGrid::axis_index(int axis, Eigen::Index flat) const
{
    if (axis == 0) return static_cast<int>(flat % points_[0]);
    return static_cast<int>(flat / points_[0]);
}

int PeriodicGrid::mode(int axis, Eigen::Index flat) const
{
    const int i = axis_index(axis, flat);
    const int n = points_[axis];
    return i < n / 2 ? i : i - n;
}

Eigen::Index PeriodicGrid::flat_index(int n0, int n1) const
{
    const int N0 = points_[0];
    const int i0 = ((n0 % N0) + N0) % N0;
    if (dims() == 1) return i0;
    const int N1 = points_[1];
    const int i1 = ((n1 % N1) + N1) % N1;
    return i0 + static_cast<Eigen::Index>(N0) * i1;
}

bool PeriodicGrid::is_nyquist(int axis, Eigen::Index flat) const
{
    return axis_index(axis, flat) == points_[axis] / 2;
}

bool PeriodicGrid::is_nyquist(Eigen::Index flat) const
{
    for (int a = 0; a < dims(); ++a)
        if (is_nyquist(a, flat)) return true;
    return false;
}

Frequency PeriodicGrid::frequency(Eigen::Index flat) const
{
    Frequency xi(dims());
    for (int a = 0; a < dims(); ++a) xi(a) = k_[a](flat);
    return xi;
}

std::vector<double> PeriodicGrid::axis_wavenumbers(int axis) const
{
    std::vector<double> out;
    const int n = points_[axis];
    for (int m = -n / 2; m < n / 2; ++m) out.push_back(2.0 * std::numbers::pi * m / lengths_[axis]);
    return out;
}

double PeriodicGrid::max_wavenumber(int axis) const
{
    return std::numbers::pi * points_[axis] / lengths_[axis];
}

double PeriodicGrid::max_wavenumber_norm() const { return knorm_.maxCoeff(); }

RealField PeriodicGrid::coordinate(int axis) const
{
    RealField x(size_);
    for (Eigen::Index f = 0; f < size_; ++f) x(f) = axis_index(axis, f) * spacing(axis);
    return x;
}

bool PeriodicGrid::operator==(const PeriodicGrid& other) const
{
    return points_ == other.points_ && lengths_ == other.lengths_;
}

PeriodicGrid make_grid(std::vector<double> lengths, std::vector<int> points)
{
    return PeriodicGrid(std::move(lengths), std::move(points));
}

void check_size(const PeriodicGrid& grid, Eigen::Index n, const char* what)
{
    if (n != grid.size()) {
        std::ostringstream os;
        os << what << ": field has " << n << " samples, grid has " << grid.size();
        throw GridMismatch(os.str());
    }
}

namespace {

struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan inv = nullptr;
};

// Plans are created once per shape and reused through the new-array interface.
PlanPair plans_for(const PeriodicGrid& g)
{
    static std::map<std::vector<int>, PlanPair> cache;
    std::vector<int> shape;
    for (int a = g.dims() - 1; a >= 0; --a) shape.push_back(g.points(a));
    auto it = cache.find(shape);
    if (it != cache.end()) return it->second;
    const std::size_t n = static_cast<std::size_t>(g.size());
    fftw_complex* in = fftw_alloc_complex(n);
    fftw_complex* out = fftw_alloc_complex(n);
    PlanPair p;
    p.fwd = fftw_plan_dft(static_cast<int>(shape.size()), shape.data(), in, out, FFTW_FORWARD, FFTW_ESTIMATE);
    p.inv = fftw_plan_dft(static_cast<int>(shape.size()), shape.data(), in, out, FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_free(in);
    fftw_free(out);
    cache.emplace(shape, p);
    return p;
}

}  // namespace

struct FourierTransform::Impl {
    PlanPair plans;
    fftw_complex* in = nullptr;
    fftw_complex* out = nullptr;
    std::vector<Eigen::Index> mirror;
    ~Impl()
    {
        fftw_free(in);
        fftw_free(out);
    }
};

FourierTransform::FourierTransform(const PeriodicGrid& grid) : grid_(grid), impl_(new Impl)
{
    const std::size_t n = static_cast<std::size_t>(grid.size());
    impl_->plans = plans_for(grid);
    impl_->in = fftw_alloc_complex(n);
    impl_->out = fftw_alloc_complex(n);
    impl_->mirror.resize(n);
    for (Eigen::Index f = 0; f < grid.size(); ++f) {
        impl_->mirror[f] = grid.dims() == 1 ? grid.flat_index(-grid.mode(0, f))
                                            : grid.flat_index(-grid.mode(0, f), -grid.mode(1, f));
    }
}
FourierTransform::~FourierTransform() { delete impl_; }
FourierTransform::FourierTransform(FourierTransform&& o) noexcept : grid_(o.grid_), impl_(o.impl_) { o.impl_ = nullptr; }
FourierTransform& FourierTransform::operator=(FourierTransform&& o) noexcept
{
    if (this != &o) {
        delete impl_;
        grid_ = o.grid_;
        impl_ = o.impl_;
        o.impl_ = nullptr;
    }
    return *this;
}

void FourierTransform::transform(ComplexField& data, bool inverse)
{
    const Eigen::Index n = data.size();
    auto* in = reinterpret_cast<Complex*>(impl_->in);
    std::copy(data.data(), data.data() + n, in);
    fftw_execute_dft(inverse ? impl_->plans.inv : impl_->plans.fwd, impl_->in, impl_->out);
    const auto* out = reinterpret_cast<const Complex*>(impl_->out);
    if (inverse) {
        const double s = 1.0 / static_cast<double>(n);
        for (Eigen::Index i = 0; i < n; ++i) data(i) = out[i] * s;
    } else {
        std::copy(out, out + n, data.data());
    }
}

ComplexField FourierTransform::forward(const ComplexField& u)
{
    check_size(grid_, u.size(), "forward transform");
    ComplexField d = u;
    transform(d, false);
    return d;
}

ComplexField FourierTransform::forward(const RealField& u)
{
    check_size(grid_, u.size(), "forward transform");
    ComplexField d = u.cast<Complex>();
    transform(d, false);
    return d;
}

ComplexField FourierTransform::inverse(const ComplexField& uhat)
{
    check_size(grid_, uhat.size(), "inverse transform");
    ComplexField d = uhat;
    transform(d, true);
    return d;
}

RealField FourierTransform::inverse_real(const ComplexField& uhat) { return inverse(uhat).real(); }


void FourierTransform::forward_pair(const RealField& a, const RealField& b, ComplexField& ahat, ComplexField& bhat)
{
    check_size(grid_, a.size(), "forward transform");
    check_size(grid_, b.size(), "forward transform");
    ComplexField d(a.size());
    d.real() = a;
    d.imag() = b;
    transform(d, false);
    ahat.resize(d.size());
    bhat.resize(d.size());
    for (Eigen::Index f = 0; f < d.size(); ++f) {
        const Complex c = std::conj(d(impl_->mirror[f]));
        ahat(f) = 0.5 * (d(f) + c);
        bhat(f) = Complex(0.0, -0.5) * (d(f) - c);
    }
}

void FourierTransform::inverse_pair(const ComplexField& ahat, const ComplexField& bhat, RealField& a, RealField& b)
{
    ComplexField d = ahat + Complex(0.0, 1.0) * bhat;
    transform(d, true);
    a = d.real();
    b = d.imag();
}

ComplexField lattice_values(const PeriodicGrid& grid, const Multiplier& m)
{
    ComplexField v(grid.size());
    for (Eigen::Index f = 0; f < grid.size(); ++f) {
        const Complex z = m(grid.frequency(f));
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
            std::ostringstream os;
            os << "multiplier is not finite at lattice point " << grid.frequency(f).transpose();
            throw MultiplierDomainError(os.str());
        }
        v(f) = z;
    }
    return v;
}

ComplexField fourier_multiplier(const PeriodicGrid& grid, const ComplexField& u, const ComplexField& mvals)
{
    check_size(grid, u.size(), "fourier_multiplier");
    check_size(grid, mvals.size(), "fourier_multiplier");
    FourierTransform ft(grid);
    return ft.inverse(ft.forward(u) * mvals);
}

RealField fourier_multiplier(const PeriodicGrid& grid, const RealField& u, const ComplexField& mvals)
{
    check_size(grid, u.size(), "fourier_multiplier");
    check_size(grid, mvals.size(), "fourier_multiplier");
    FourierTransform ft(grid);
    return ft.inverse_real(ft.forward(u) * mvals);
}

RealField japanese_bracket(const PeriodicGrid& grid)
{
    return (1.0 + grid.wavenumber_norm().square()).sqrt();
}

RealField bracket_power(const PeriodicGrid& grid, double s)
{
    return (1.0 + grid.wavenumber_norm().square()).pow(0.5 * s);
}

RealField spectral_derivative(const PeriodicGrid& grid, const RealField& u, int axis)
{
    check_size(grid, u.size(), "spectral_derivative");
    FourierTransform ft(grid);
    ComplexField uh = ft.forward(u);
    const RealField& k = grid.wavenumber(axis);
    for (Eigen::Index f = 0; f < uh.size(); ++f)
        uh(f) = grid.is_nyquist(axis, f) ? Complex(0.0) : Complex(0.0, k(f)) * uh(f);
    return ft.inverse_real(uh);
}

VectorField spectral_gradient(const PeriodicGrid& grid, const RealField& u)
{
    check_size(grid, u.size(), "spectral_gradient");
    FourierTransform ft(grid);
    const ComplexField uh = ft.forward(u);
    VectorField out;
    for (int a = 0; a < grid.dims(); ++a) {
        ComplexField d(uh.size());
        const RealField& k = grid.wavenumber(a);
        for (Eigen::Index f = 0; f < uh.size(); ++f)
            d(f) = grid.is_nyquist(a, f) ? Complex(0.0) : Complex(0.0, k(f)) * uh(f);
        out.push_back(ft.inverse_real(d));
    }
    return out;
}

RealField spectral_divergence(const PeriodicGrid& grid, const VectorField& v)
{
    if (static_cast<int>(v.size()) != grid.dims()) throw GridMismatch("spectral_divergence: component count");
    RealField out = RealField::Zero(grid.size());
    for (int a = 0; a < grid.dims(); ++a) out += spectral_derivative(grid, v[a], a);
    return out;
}

RealField spectral_laplacian(const PeriodicGrid& grid, const RealField& u)
{
    check_size(grid, u.size(), "spectral_laplacian");
    FourierTransform ft(grid);
    return ft.inverse_real(ft.forward(u) * (-grid.wavenumber_norm().square()).cast<Complex>());
}

Eigen::Array<bool, Eigen::Dynamic, 1> dealias_mask(const PeriodicGrid& grid)
{
    Eigen::Array<bool, Eigen::Dynamic, 1> keep(grid.size());
    for (Eigen::Index f = 0; f < grid.size(); ++f) {
        bool k = true;
        for (int a = 0; a < grid.dims(); ++a)
            if (3 * std::abs(grid.mode(a, f)) > grid.points(a)) k = false;
        keep(f) = k;
    }
    return keep;
}

RealField dealias(const PeriodicGrid& grid, const RealField& u)
{
    check_size(grid, u.size(), "dealias");
    FourierTransform ft(grid);
    ComplexField uh = ft.forward(u);
    const auto keep = dealias_mask(grid);
    for (Eigen::Index f = 0; f < uh.size(); ++f)
        if (!keep(f)) uh(f) = 0.0;
    return ft.inverse_real(uh);
}

RealField dealiased_product(const PeriodicGrid& grid, const RealField& a, const RealField& b)
{
    check_size(grid, a.size(), "dealiased_product");
    check_size(grid, b.size(), "dealiased_product");
    return dealias(grid, a * b);
}

double pairwise_sum(const double* p, Eigen::Index n)
{
    if (n <= 16) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) s += p[i];
        return s;
    }
    const Eigen::Index h = n / 2;
    return pairwise_sum(p, h) + pairwise_sum(p + h, n - h);
}

double integral(const PeriodicGrid& grid, const RealField& u)
{
    check_size(grid, u.size(), "integral");
    return pairwise_sum(u) * grid.cell_volume();
}

double inner_product(const PeriodicGrid& grid, const RealField& a, const RealField& b)
{
    check_size(grid, a.size(), "inner_product");
    check_size(grid, b.size(), "inner_product");
    const RealField p = a * b;
    return pairwise_sum(p) * grid.cell_volume();
}

double l2_norm(const PeriodicGrid& grid, const RealField& u) { return std::sqrt(inner_product(grid, u, u)); }

double l2_norm(const PeriodicGrid& grid, const VectorField& v)
{
    double s = 0.0;
    for (const auto& c : v) s += inner_product(grid, c, c);
    return std::sqrt(s);
}

double sobolev_norm(const PeriodicGrid& grid, const RealField& u, double s)
{
    check_size(grid, u.size(), "sobolev_norm");
    FourierTransform ft(grid);
    const RealField w = bracket_power(grid, 2.0 * s) * ft.forward(u).abs2();
    const double n = static_cast<double>(grid.size());
    return std::sqrt(pairwise_sum(w) * grid.volume() / (n * n));
}

double sobolev_norm(const PeriodicGrid& grid, const VectorField& u, double s)
{
    double acc = 0.0;
    for (const auto& c : u) {
        const double v = sobolev_norm(grid, c, s);
        acc += v * v;
    }
    return std::sqrt(acc);
}

RealField shift(const PeriodicGrid& grid, const RealField& u, int cells0, int cells1)
{
    check_size(grid, u.size(), "shift");
    RealField out(u.size());
    const int n0 = grid.points(0);
    if (grid.dims() == 1) {
        for (int i = 0; i < n0; ++i) out(((i + cells0) % n0 + n0) % n0) = u(i);
        return out;
    }
    const int n1 = grid.points(1);
    for (int i1 = 0; i1 < n1; ++i1)
        for (int i0 = 0; i0 < n0; ++i0) {
            const int j0 = ((i0 + cells0) % n0 + n0) % n0;
            const int j1 = ((i1 + cells1) % n1 + n1) % n1;
            out(j0 + static_cast<Eigen::Index>(n0) * j1) = u(i0 + static_cast<Eigen::Index>(n0) * i1);
        }
    return out;
}

}  // namespace ulwaves

namespace ulwaves {

namespace {

PeriodicGrid doubled(const PeriodicGrid& g)
{
    std::vector<int> p = g.points();
    for (auto& n : p) n *= 2;
    return PeriodicGrid(g.lengths(), p);
}

ComplexField pad_spectrum(const PeriodicGrid& g, const PeriodicGrid& big, const ComplexField& uh)
{
    ComplexField out = ComplexField::Zero(big.size());
    for (Eigen::Index f = 0; f < g.size(); ++f) {
        const Eigen::Index t = g.dims() == 1 ? big.flat_index(g.mode(0, f)) : big.flat_index(g.mode(0, f), g.mode(1, f));
        out(t) = uh(f);
    }
    return out;
}

ComplexField truncate_spectrum(const PeriodicGrid& g, const PeriodicGrid& big, const ComplexField& uh)
{
    ComplexField out(g.size());
    for (Eigen::Index f = 0; f < g.size(); ++f) {
        const Eigen::Index t = g.dims() == 1 ? big.flat_index(g.mode(0, f)) : big.flat_index(g.mode(0, f), g.mode(1, f));
        out(f) = uh(t);
    }
    return out;
}

}  // namespace

ComplexField truncated_product(const PeriodicGrid& grid, const ComplexField& a, const ComplexField& b)
{
    check_size(grid, a.size(), "truncated_product");
    check_size(grid, b.size(), "truncated_product");
    const PeriodicGrid big = doubled(grid);
    FourierTransform ft(grid), fb(big);
    const double scale = static_cast<double>(big.size()) / grid.size();
    const ComplexField ap = fb.inverse(pad_spectrum(grid, big, ft.forward(a)));
    const ComplexField bp = fb.inverse(pad_spectrum(grid, big, ft.forward(b)));
    const ComplexField ph = fb.forward(ComplexField(ap * bp));
    return ft.inverse(truncate_spectrum(grid, big, ph) * scale);
}

RealField truncated_product(const PeriodicGrid& grid, const RealField& a, const RealField& b)
{
    return truncated_product(grid, a.cast<Complex>().eval(), b.cast<Complex>().eval()).real();
}

}  // namespace ulwaves
