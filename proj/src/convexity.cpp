#include "quasisym/convexity.hpp"

#include "quasisym/errors.hpp"

#include <algorithm>
#include <cmath>

namespace quasisym {

namespace {
constexpr double kStrict = 1e-12;

double coeff_scale(const QPolynomial &q) {
    return std::max({std::abs(q.c3), std::abs(q.c2), std::abs(q.c1), std::abs(q.c0), 1.0});
}
} // namespace

GammaTriple gamma_coefficients(double p, double k) {
    GammaTriple g;
    g.gamma1 = 2.0 * p * p - (2.0 + 3.0 * k) * p + k * k + k;
    g.gamma2 = 4.0 * p * p - (4.0 + 3.0 * k) * p - k * (k - 1.0);
    g.gamma3 = 2.0 * p * (p - 1.0);
    g.gamma1_factored = (p - k - 1.0) * (2.0 * p - k);
    g.gamma2_factored = 4.0 * p * (p - k - 1.0) + k * (p - k + 1.0);
    return g;
}

PiQuadruple pi_coefficients(double p, double k) {
    PiQuadruple q;
    q.pi1 = 4.0 * p * (p - 1.0) * (p - 2.0);
    q.pi2 = -12.0 * k * p * (p - 1.0) - 8.0 * p * k * (k - 1.0) - 2.0 * k * (k - 1.0) * (k - 2.0);
    q.pi3 = k * k * (19.0 * p + 13.0 * k - 13.0);
    q.pi4 = -14.0 * k * k * k;
    return q;
}

QPolynomial qp_coefficients(double p, double k) {
    PiQuadruple pi = pi_coefficients(p, k);
    QPolynomial q;
    q.c3 = pi.pi1 + pi.pi2 + pi.pi3 + pi.pi4;
    q.c2 = 3.0 * pi.pi1 + 2.0 * pi.pi2 + pi.pi3;
    q.c1 = 3.0 * pi.pi1 + pi.pi2;
    q.c0 = pi.pi1;
    return q;
}

double qp_eval(const QPolynomial &q, double k, double s) {
    if (!(s > 0.0))
        throw usage_error("qp_eval: s must be positive");
    double xi = std::pow(s, k);
    return ((q.c3 * xi + q.c2) * xi + q.c1) * xi + q.c0;
}

ConvexityCertificate certify_h_convex(double p, double k) {
    ConvexityCertificate cert;
    cert.p = p;
    cert.k = k;
    cert.gamma = gamma_coefficients(p, k);
    cert.pi = pi_coefficients(p, k);
    cert.q = qp_coefficients(p, k);

    double scale = std::max(1.0, p * p + k * k);
    double band = kStrict * scale;
    if (!(p > k + 1.0 + band)) {
        cert.h_reason = "p <= k + 1";
        return cert;
    }
    if (!(k >= 2.0)) {
        cert.h_reason = "k < 2";
        return cert;
    }
    if (!(cert.gamma.gamma1 > band)) {
        cert.h_reason = "gamma1 not strictly positive";
        return cert;
    }
    if (!(cert.gamma.gamma2 > band)) {
        cert.h_reason = "gamma2 not strictly positive";
        return cert;
    }
    cert.h_convex = true;
    cert.margin = std::min(cert.gamma.gamma1, cert.gamma.gamma2);
    return cert;
}

ConvexityCertificate certify_hprime_convex(double p, double k, CertifyMode mode) {
    if (!(k > 1.0))
        throw usage_error("certify_hprime_convex: k must exceed 1");
    ConvexityCertificate cert;
    cert.p = p;
    cert.k = k;
    cert.mode = mode;
    cert.gamma = gamma_coefficients(p, k);
    cert.pi = pi_coefficients(p, k);
    cert.q = qp_coefficients(p, k);

    const QPolynomial &q = cert.q;
    const double band = kStrict * coeff_scale(q);

    if (mode == CertifyMode::Sufficient) {
        if (!(q.c3 > band)) {
            cert.hprime_reason = "sum pi1+pi2+pi3+pi4 not strictly positive";
            return cert;
        }
        if (!(q.c2 > band)) {
            cert.hprime_reason = "sum 3pi1+2pi2+pi3 not strictly positive";
            return cert;
        }
        if (!(q.c1 > band)) {
            cert.hprime_reason = "sum 3pi1+pi2 not strictly positive";
            return cert;
        }
        cert.hprime_convex = true;
        cert.margin = std::min({q.c3, q.c2, q.c1});
        return cert;
    }

    // Sharp mode: Q > 0 on (0, inf) as a cubic in Xi = s^k.
    if (q.c3 < -band) {
        cert.hprime_reason = "c3 < 0 so Q_p is negative for large s";
        return cert;
    }
    if (q.c0 < -band) {
        cert.hprime_reason = "c0 < 0 so Q_p is negative near s = 0";
        return cert;
    }

    auto accept = [&cert](double min_val, double where) {
        cert.hprime_convex = true;
        cert.margin = min_val;
        cert.s_sharp = where;
    };

    if (std::abs(q.c3) <= band) {
        if (std::abs(q.c2) <= band) {
            // Linear branch.
            if (q.c1 < -band) {
                cert.hprime_reason = "degenerate linear Q with negative slope";
                return cert;
            }
            if (q.c0 > band)
                accept(q.c0, 0.0);
            else
                cert.hprime_reason = "degenerate linear Q with vanishing value at 0";
            return cert;
        }
        // Quadratic branch.
        if (q.c2 < -band) {
            cert.hprime_reason = "degenerate quadratic Q opens downward";
            return cert;
        }
        double vertex = -q.c1 / (2.0 * q.c2);
        if (vertex <= 0.0) {
            if (q.c0 > band)
                accept(q.c0, 0.0);
            else
                cert.hprime_reason = "quadratic Q vanishes at s = 0";
            return cert;
        }
        double qmin = q.c0 - q.c1 * q.c1 / (4.0 * q.c2);
        if (qmin > band)
            accept(qmin, std::pow(vertex, 1.0 / k));
        else
            cert.hprime_reason = "quadratic Q not positive at its vertex";
        return cert;
    }

    // Genuine cubic with c3 > 0. The interior minimum, if any, is the larger
    // root of 3 c3 Xi^2 + 2 c2 Xi + c1 = 0.
    double disc = q.c2 * q.c2 - 3.0 * q.c3 * q.c1;
    if (disc <= 0.0) {
        if (q.c0 > -band)
            accept(q.c0, 0.0);
        else
            cert.hprime_reason = "Q negative at s = 0";
        return cert;
    }
    double xi_min = (-q.c2 + std::sqrt(disc)) / (3.0 * q.c3);
    if (xi_min <= 0.0) {
        if (q.c0 > -band)
            accept(q.c0, 0.0);
        else
            cert.hprime_reason = "Q negative at s = 0";
        return cert;
    }
    double qmin = ((q.c3 * xi_min + q.c2) * xi_min + q.c1) * xi_min + q.c0;
    if (qmin > band)
        accept(qmin, std::pow(xi_min, 1.0 / k));
    else
        cert.hprime_reason = "Q not positive at its interior stationary point";
    return cert;
}

double find_pk(double k, CertifyMode mode, double tol) {
    if (!(k > 1.0))
        throw usage_error("find_pk: k must exceed 1");
    if (!(tol > 0.0))
        throw usage_error("find_pk: tol must be positive");

    const double ceiling = 4.0 * k + 8.0;
    auto ok = [&](double p) { return certify_hprime_convex(p, k, mode).hprime_convex; };

    // Upward scan: locate the last failing sample.
    double last_fail = -1.0;
    bool any_pass = false;
    for (double p = 2.0; p <= ceiling + 0.5 * tol; p += tol) {
        if (ok(p))
            any_pass = true;
        else
            last_fail = p;
    }
    if (!any_pass || (last_fail >= 0.0 && last_fail + tol > ceiling))
        throw convergence_error("find_pk: no certified exponent below the scan ceiling " +
                                std::to_string(ceiling));
    if (last_fail < 0.0)
        return 2.0; // certified from the start of the scan

    // Bisection refinement on the pass/fail boundary.
    double lo = last_fail, hi = last_fail + tol;
    for (int i = 0; i < 80 && hi - lo > 1e-14 * std::max(1.0, hi); ++i) {
        double mid = 0.5 * (lo + hi);
        if (ok(mid))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

ProfileTable scan_profile(const DerivativeBundle &bundle, int order, double s_lo, double s_hi,
                          int samples, Exec exec) {
    if (order != 2 && order != 3)
        throw usage_error("scan_profile: order must be 2 or 3");
    if (!(s_lo > 0.0) || !(s_hi > s_lo))
        throw usage_error("scan_profile: require 0 < s_lo < s_hi");
    if (samples < 2)
        throw usage_error("scan_profile: need at least 2 samples");

    ProfileTable table;
    table.order = order;
    table.s.resize(samples);
    table.value.resize(samples);
    const double step = (s_hi - s_lo) / (samples - 1);
    parallel_for(exec, static_cast<std::size_t>(samples), [&](std::size_t i) {
        double s = s_lo + step * static_cast<double>(i);
        table.s[i] = s;
        table.value[i] = bundle.h(1.0, s, order);
    });
    std::size_t best = 0;
    for (std::size_t i = 1; i < table.value.size(); ++i)
        if (table.value[i] < table.value[best])
            best = i;
    table.min_value = table.value[best];
    table.arg_min = table.s[best];
    return table;
}

} // namespace quasisym
