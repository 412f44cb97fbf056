#pragma once

#include <Eigen/Core>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ulwaves {

using Complex = std::complex<double>;
using RealField = Eigen::ArrayXd;
using ComplexField = Eigen::ArrayXcd;
using VectorField = std::vector<RealField>;
using Frequency = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 2, 1>;

class InvalidGrid : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class GridMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class MultiplierDomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Tensor grid on a periodic box. Flat index is i0 + N0 * i1.
class PeriodicGrid {
public:
    PeriodicGrid(std::vector<double> lengths, std::vector<int> points);

    int dims() const { return static_cast<int>(points_.size()); }
    Eigen::Index size() const { return size_; }
    int points(int axis) const { return points_[axis]; }
    double length(int axis) const { return lengths_[axis]; }
    const std::vector<int>& points() const { return points_; }
    const std::vector<double>& lengths() const { return lengths_; }
    double spacing(int axis) const { return lengths_[axis] / points_[axis]; }
    double cell_volume() const;
    double volume() const;

    // Signed mode number along an axis, in [-N/2, N/2).
    int mode(int axis, Eigen::Index flat) const;
    int axis_index(int axis, Eigen::Index flat) const;
    Eigen::Index flat_index(int n0, int n1 = 0) const;
    bool is_nyquist(int axis, Eigen::Index flat) const;
    bool is_nyquist(Eigen::Index flat) const;

    // Wavenumber component along an axis for every flat spectral index.
    const RealField& wavenumber(int axis) const { return k_[axis]; }
    const RealField& wavenumber_norm() const { return knorm_; }
    Frequency frequency(Eigen::Index flat) const;
    // Sorted distinct wavenumbers of one axis, from -pi N/L to pi (N-2)/L.
    std::vector<double> axis_wavenumbers(int axis) const;
    double max_wavenumber(int axis) const;
    double max_wavenumber_norm() const;

    RealField coordinate(int axis) const;

    bool operator==(const PeriodicGrid& other) const;
    bool operator!=(const PeriodicGrid& other) const { return !(*this == other); }

private:
    std::vector<double> lengths_;
    std::vector<int> points_;
    Eigen::Index size_ = 0;
    std::vector<RealField> k_;
    RealField knorm_;
};

PeriodicGrid make_grid(std::vector<double> lengths, std::vector<int> points);

void check_size(const PeriodicGrid& grid, Eigen::Index n, const char* what);

// Unnormalized forward transform, inverse carries 1/N.
class FourierTransform {
public:
    explicit FourierTransform(const PeriodicGrid& grid);
    ~FourierTransform();
    FourierTransform(FourierTransform&&) noexcept;
    FourierTransform& operator=(FourierTransform&&) noexcept;
    FourierTransform(const FourierTransform&) = delete;
    FourierTransform& operator=(const FourierTransform&) = delete;

    const PeriodicGrid& grid() const { return grid_; }
    ComplexField forward(const ComplexField& u);
    ComplexField forward(const RealField& u);
    ComplexField inverse(const ComplexField& uhat);
    RealField inverse_real(const ComplexField& uhat);

    // Two real fields through one complex transform.
    void forward_pair(const RealField& a, const RealField& b, ComplexField& ahat, ComplexField& bhat);
    void inverse_pair(const ComplexField& ahat, const ComplexField& bhat, RealField& a, RealField& b);

private:
    void transform(ComplexField& data, bool inverse);
    PeriodicGrid grid_;
    struct Impl;
    Impl* impl_;
};

using Multiplier = std::function<Complex(const Frequency&)>;

// Values of m on the lattice, flat spectral ordering.
ComplexField lattice_values(const PeriodicGrid& grid, const Multiplier& m);

ComplexField fourier_multiplier(const PeriodicGrid& grid, const ComplexField& u, const ComplexField& mvals);
// Real input: output is the real part, which makes odd multipliers vanish on Nyquist modes.
RealField fourier_multiplier(const PeriodicGrid& grid, const RealField& u, const ComplexField& mvals);

template <typename Scalar>
Eigen::Array<Scalar, Eigen::Dynamic, 1> fourier_multiplier(const PeriodicGrid& grid,
                                                           const Eigen::Array<Scalar, Eigen::Dynamic, 1>& u,
                                                           const Multiplier& m)
{
    return fourier_multiplier(grid, u, lattice_values(grid, m));
}

// <xi> = sqrt(1 + |xi|^2), |xi|, and the smoothing exponential exp(c <xi>) on the lattice.
RealField japanese_bracket(const PeriodicGrid& grid);
RealField bracket_power(const PeriodicGrid& grid, double s);

VectorField spectral_gradient(const PeriodicGrid& grid, const RealField& u);
RealField spectral_divergence(const PeriodicGrid& grid, const VectorField& v);
RealField spectral_laplacian(const PeriodicGrid& grid, const RealField& u);
RealField spectral_derivative(const PeriodicGrid& grid, const RealField& u, int axis);

// 2/3 rule: keep modes with |n_i| <= N_i/3 on every axis.
RealField dealias(const PeriodicGrid& grid, const RealField& u);
Eigen::Array<bool, Eigen::Dynamic, 1> dealias_mask(const PeriodicGrid& grid);
// Product of two band-limited real fields with the 2/3 filter applied to the result.
RealField dealiased_product(const PeriodicGrid& grid, const RealField& a, const RealField& b);

double pairwise_sum(const double* p, Eigen::Index n);
inline double pairwise_sum(const RealField& u) { return pairwise_sum(u.data(), u.size()); }
double integral(const PeriodicGrid& grid, const RealField& u);
double inner_product(const PeriodicGrid& grid, const RealField& a, const RealField& b);
double l2_norm(const PeriodicGrid& grid, const RealField& u);
double l2_norm(const PeriodicGrid& grid, const VectorField& v);
// Continuous-normalized spectral norm sqrt(sum <k>^{2s} |u_k|^2 * V / N^2).
double sobolev_norm(const PeriodicGrid& grid, const RealField& u, double s);
double sobolev_norm(const PeriodicGrid& grid, const VectorField& u, double s);

// Shift by integer numbers of cells, periodic.
RealField shift(const PeriodicGrid& grid, const RealField& u, int cells0, int cells1 = 0);

}  // namespace ulwaves

namespace ulwaves {

// Product with the spectrum of the result truncated to the grid lattice (no folding).
ComplexField truncated_product(const PeriodicGrid& grid, const ComplexField& a, const ComplexField& b);
RealField truncated_product(const PeriodicGrid& grid, const RealField& a, const RealField& b);

}  // namespace ulwaves
