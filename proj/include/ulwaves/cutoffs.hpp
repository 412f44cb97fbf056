#pragma once

#include <cmath>

namespace ulwaves {

// C-infinity step: 0 for t <= 0, 1 for t >= 1.
inline double smoothstep(double t)
{
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / t);
    const double b = std::exp(-1.0 / (1.0 - t));
    return a / (a + b);
}

// 1 on [0,1], 0 on [2,inf).
inline double lowpass_profile(double r) { return smoothstep(2.0 - r); }

// Annulus profile supported in [1/2, 2].
inline double annulus_profile(double r) { return lowpass_profile(r) - lowpass_profile(2.0 * r); }

}  // namespace ulwaves
