#pragma once

#include "quasisym/nonlin.hpp"

#include <cmath>
#include <cstdlib>

namespace testsupport {

/// Relative difference with a floor so near-zero pairs compare absolutely.
inline double rel_diff(double a, double b, double floor_scale = 1.0) {
    double denom = std::max({std::abs(a), std::abs(b), floor_scale});
    return std::abs(a - b) / denom;
}

inline quasisym::NonlinearitySpec power_spec(double k, double p, int dim = 3) {
    quasisym::NonlinearitySpec spec;
    spec.k = k;
    spec.p = p;
    spec.dim = dim;
    return spec;
}

inline quasisym::NonlinearitySpec constant_spec(double a_const, double p, int dim = 3) {
    quasisym::NonlinearitySpec spec;
    spec.constant_a = true;
    spec.a_const = a_const;
    spec.p = p;
    spec.dim = dim;
    return spec;
}

/// Closed form of the inverse change of variable for a(t) = 1 + t^2:
/// s(g) = (g sqrt(1+g^2) + asinh g) / 2.
inline double s_of_g_k2(double g) {
    return 0.5 * (g * std::sqrt(1.0 + g * g) + std::asinh(g));
}

} // namespace testsupport
