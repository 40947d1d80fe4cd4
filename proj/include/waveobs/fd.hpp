#pragma once

// Shared finite-difference policy: central differences in the interior,
// second-order one-sided stencils at the ends. Keeping this in one place
// means observations, compatibility checks and boundary samplers all
// differentiate the same way.

#include <cstddef>
#include <functional>
#include <vector>

#include "waveobs/errors.hpp"

namespace waveobs {

using Func1 = std::function<double(double)>;

// d/ds of a sampled sequence on a uniform grid with spacing h.
inline std::vector<double> sampled_derivative(const std::vector<double>& f,
                                              double h) {
    const std::size_t n = f.size();
    if (n < 3)
        throw ValidationError("fd", "need at least 3 samples to differentiate",
                              ErrorCode::too_few_samples);
    std::vector<double> d(n);
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    return d;
}

// Second difference of a sampled sequence (one-sided ends, second order).
inline std::vector<double> sampled_second_derivative(const std::vector<double>& f,
                                                     double h) {
    const std::size_t n = f.size();
    if (n < 4)
        throw ValidationError("fd", "need at least 4 samples for a second derivative",
                              ErrorCode::too_few_samples);
    std::vector<double> d(n);
    const double h2 = h * h;
    d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2;
    for (std::size_t i = 1; i + 1 < n; ++i)
        d[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / h2;
    d[n - 1] =
        (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / h2;
    return d;
}

// Pointwise central differences of a callable. Step 1e-5 balances
// truncation against roundoff for first derivatives in double precision;
// second derivatives need the wider 1e-4 step to stay above roundoff.
inline constexpr double kFdStep = 1e-5;
inline constexpr double kFdStep2 = 1e-4;

inline double deriv1(const Func1& f, double s, double h = kFdStep) {
    return (f(s + h) - f(s - h)) / (2.0 * h);
}

inline double deriv2(const Func1& f, double s, double h = kFdStep2) {
    return (f(s + h) - 2.0 * f(s) + f(s - h)) / (h * h);
}

// Linear interpolation into uniform samples over [s0, s0 + n*h]; clamps
// to the end values outside the range.
inline double interp_uniform(const std::vector<double>& f, double s0, double h,
                             double s) {
    if (f.empty()) throw ValidationError("fd", "interpolating empty samples");
    const double pos = (s - s0) / h;
    if (pos <= 0.0) return f.front();
    if (pos >= double(f.size() - 1)) return f.back();
    const std::size_t i = std::size_t(pos);
    const double w = pos - double(i);
    return f[i] * (1.0 - w) + f[i + 1] * w;
}

} // namespace waveobs
