#pragma once

#include "quasisym/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>

namespace quasisym {

template <std::size_t N>
using OdeState = std::array<double, N>;

struct OdeOptions {
    double tol = 1e-10;      // absolute and relative error target per step
    double max_step = 1e300; // hard cap on the step size
    double initial_step = 0; // 0 = pick automatically
    long max_steps = 4000000;
};

/// Dormand-Prince 4(5) embedded pair with FSAL and standard PI-free step
/// control. rhs(t, y, dy) fills dy; on_step(t0, y0, f0, t1, y1, f1) is called
/// after every accepted step with the derivative at both ends (enough for
/// cubic Hermite dense output) and returns false to stop early.
///
/// Returns true if t_end was reached, false if the callback stopped the run.
/// Throws convergence_error when the step size underflows or the step budget
/// is exhausted, and eval_domain_error if the rhs produces a non-finite value
/// at the very first evaluation.
template <std::size_t N, class Rhs, class Callback>
bool integrate_rk45(Rhs &&rhs, double t0, OdeState<N> y0, double t_end,
                    const OdeOptions &opt, Callback &&on_step) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    if (!(t_end > t0))
        throw usage_error("integrate_rk45: t_end must exceed t0");
    if (!(opt.tol > 0) || !(opt.max_step > 0))
        throw usage_error("integrate_rk45: tol and max_step must be positive");

    OdeState<N> y = y0, k1{}, k2{}, k3{}, k4{}, k5{}, k6{}, k7{}, yt{}, ynew{};
    double t = t0;
    rhs(t, y, k1);
    for (double v : k1)
        if (!std::isfinite(v))
            throw eval_domain_error("integrate_rk45: rhs not finite at t0 = " + std::to_string(t0));

    double span = t_end - t0;
    double h = opt.initial_step > 0 ? opt.initial_step : span / 100.0;
    h = std::min({h, opt.max_step, span});

    for (long step = 0; step < opt.max_steps; ++step) {
        if (t >= t_end)
            return true;
        h = std::min({h, opt.max_step, t_end - t});
        if (h < 1e-14 * std::max(1.0, std::abs(t)))
            throw convergence_error("integrate_rk45: step size underflow at t = " + std::to_string(t));

        for (std::size_t i = 0; i < N; ++i)
            yt[i] = y[i] + h * a21 * k1[i];
        rhs(t + c2 * h, yt, k2);
        for (std::size_t i = 0; i < N; ++i)
            yt[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        rhs(t + c3 * h, yt, k3);
        for (std::size_t i = 0; i < N; ++i)
            yt[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        rhs(t + c4 * h, yt, k4);
        for (std::size_t i = 0; i < N; ++i)
            yt[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        rhs(t + c5 * h, yt, k5);
        for (std::size_t i = 0; i < N; ++i)
            yt[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        rhs(t + h, yt, k6);
        for (std::size_t i = 0; i < N; ++i)
            ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        rhs(t + h, ynew, k7);

        bool finite = true;
        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            if (!std::isfinite(ynew[i]) || !std::isfinite(k7[i])) {
                finite = false;
                break;
            }
            double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                             e6 * k6[i] + e7 * k7[i]);
            double sc = opt.tol * (1.0 + std::max(std::abs(y[i]), std::abs(ynew[i])));
            err = std::max(err, std::abs(ei) / sc);
        }

        if (!finite || err > 1.0) {
            double shrink = finite ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.2;
            h *= shrink;
            continue;
        }

        double t_new = t + h;
        if (!on_step(t, y, k1, t_new, ynew, k7))
            return false;
        t = t_new;
        y = ynew;
        k1 = k7; // FSAL
        double grow = err > 1e-30 ? 0.9 * std::pow(err, -0.2) : 5.0;
        h *= std::clamp(grow, 0.2, 5.0);
    }
    throw convergence_error("integrate_rk45: step budget exhausted before t_end");
}

/// Cubic Hermite interpolation on [t0, t1] from endpoint values/slopes.
inline double hermite_value(double t0, double y0, double d0, double t1, double y1,
                            double d1, double t) {
    double h = t1 - t0;
    if (h == 0.0)
        return y0;
    double x = (t - t0) / h;
    double h00 = (1 + 2 * x) * (1 - x) * (1 - x);
    double h10 = x * (1 - x) * (1 - x);
    double h01 = x * x * (3 - 2 * x);
    double h11 = x * x * (x - 1);
    return h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
}

/// Derivative of the cubic Hermite interpolant at t.
inline double hermite_slope(double t0, double y0, double d0, double t1, double y1,
                            double d1, double t) {
    double h = t1 - t0;
    if (h == 0.0)
        return d0;
    double x = (t - t0) / h;
    double g00 = 6 * x * (x - 1) / h;
    double g10 = (3 * x - 1) * (x - 1);
    double g01 = -g00;
    double g11 = x * (3 * x - 2);
    return g00 * y0 + g10 * d0 + g01 * y1 + g11 * d1;
}

} // namespace quasisym
