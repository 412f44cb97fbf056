#pragma once

#include <vector>

namespace ulwaves {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // root mean square of y - (slope x + intercept)
};

// Least squares; throws std::invalid_argument for fewer than two points or mismatched sizes.
LineFit line_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace ulwaves
