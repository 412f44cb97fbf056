#pragma once

#include "ulwaves/grid.hpp"

#include <stdexcept>
#include <vector>

namespace ulwaves {

enum class WindowShape {
    standard,  // flat on |x| <= 0.55, vanishes for |x| >= 0.95
    steep,     // flat on |x| <= 0.75, vanishes for |x| >= 0.85
};

double window_profile(WindowShape shape, double x);

// Unit-spaced translates of a product bump, renormalized to sum to one on the torus.
class PartitionOfUnity {
public:
    explicit PartitionOfUnity(const PeriodicGrid& grid, WindowShape shape = WindowShape::standard);

    const PeriodicGrid& grid() const { return grid_; }
    std::size_t count() const { return windows_.size(); }
    const RealField& window(std::size_t q) const { return windows_[q]; }
    const std::vector<double>& center(std::size_t q) const { return centers_[q]; }
    // Sum of the raw (unnormalized) translates.
    const RealField& normalizer() const { return normalizer_; }

private:
    PeriodicGrid grid_;
    std::vector<RealField> windows_;
    std::vector<std::vector<double>> centers_;
    RealField normalizer_;
};

double ul_sobolev_norm(const RealField& u, double s, const PartitionOfUnity& pou);
double ul_sobolev_norm(const ComplexField& u, double s, const PartitionOfUnity& pou);
double ul_sobolev_norm(const VectorField& u, double s, const PartitionOfUnity& pou);
// Windowed norms for every center.
std::vector<double> windowed_norms(const RealField& u, double s, const PartitionOfUnity& pou);

class BlockIndexError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

// Blocks j = -1 .. jmax, block -1 = lowpass(2|xi|), block j = annulus(2^-j |xi|).
class DyadicDecomposition {
public:
    explicit DyadicDecomposition(const PeriodicGrid& grid);

    const PeriodicGrid& grid() const { return grid_; }
    int jmax() const { return jmax_; }
    const RealField& block_multiplier(int j) const;
    // Multiplier of S_j = sum_{k <= j-1} Delta_k (zero for j <= -1).
    RealField lowpass_multiplier(int j) const;

private:
    PeriodicGrid grid_;
    int jmax_;
    std::vector<RealField> blocks_;
};

RealField dyadic_block(const RealField& u, int j, const DyadicDecomposition& dd);
ComplexField dyadic_block(const ComplexField& u, int j, const DyadicDecomposition& dd);
RealField lowpass(const RealField& u, int j, const DyadicDecomposition& dd);
// L2 norm of every block, index 0 is block -1.
std::vector<double> block_l2_norms(const RealField& u, const DyadicDecomposition& dd);
double zygmund_norm(const RealField& u, double sigma, const DyadicDecomposition& dd);

}  // namespace ulwaves
