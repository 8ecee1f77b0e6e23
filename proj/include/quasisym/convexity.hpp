#pragma once

#include "quasisym/nonlin.hpp"
#include "quasisym/parallel.hpp"

#include <string>
#include <vector>

namespace quasisym {

/// Coefficients of the power expansion 2 a^{7/2}(t) h''(s) =
/// gamma1 t^{p+2k-2} + gamma2 t^{p+k-2} + gamma3 t^{p-2}, t = g(s).
/// The *_factored fields evaluate the same quantities through the factored
/// forms (p-k-1)(2p-k) and 4p(p-k-1) + k(p-k+1); they agree with the direct
/// expansions identically and serve as cross-checks.
struct GammaTriple {
    double gamma1 = 0, gamma2 = 0, gamma3 = 0;
    double gamma1_factored = 0, gamma2_factored = 0;
};

/// Coefficients of 4 a^5(t) h'''(s) = t^{p-3} Q_p(t).
struct PiQuadruple {
    double pi1 = 0, pi2 = 0, pi3 = 0, pi4 = 0;
};

/// Q_p as a cubic in Xi = s^k: c3 Xi^3 + c2 Xi^2 + c1 Xi + c0.
struct QPolynomial {
    double c3 = 0, c2 = 0, c1 = 0, c0 = 0;
};

enum class CertifyMode { Sufficient, Sharp };

struct ConvexityCertificate {
    double p = 0, k = 0;
    GammaTriple gamma;
    PiQuadruple pi;
    QPolynomial q;
    bool h_convex = false;
    std::string h_reason;
    bool hprime_convex = false;
    std::string hprime_reason;
    CertifyMode mode = CertifyMode::Sufficient;
    double margin = 0.0;  // smallest slack backing the verdict
    double s_sharp = 0.0; // stationary point tested in sharp mode, 0 if none
};

GammaTriple gamma_coefficients(double p, double k);
PiQuadruple pi_coefficients(double p, double k);
QPolynomial qp_coefficients(double p, double k);

/// Q_p(s) = c3 s^{3k} + c2 s^{2k} + c1 s^k + c0, s > 0.
double qp_eval(const QPolynomial &q, double k, double s);

/// Convexity of the transformed nonlinearity itself: certified exactly when
/// p > k + 1 and k >= 2 (then gamma1, gamma2 > 0 and all three powers carry
/// nonnegative coefficients). Inequalities are tested with a 1e-12 relative
/// strictness band so roundoff cannot certify a borderline pair.
ConvexityCertificate certify_h_convex(double p, double k);

/// Convexity of the derivative of the transformed nonlinearity. Sufficient
/// mode requires the three leading Q-coefficient sums to be strictly
/// positive; sharp mode certifies Q_p > 0 on (0, inf) by sign analysis of the
/// cubic in Xi = s^k, locating the interior stationary point through the
/// quadratic 3 c3 Xi^2 + 2 c2 Xi + c1 = 0 and handling the degenerate
/// (quadratic / linear) branches explicitly.
ConvexityCertificate certify_hprime_convex(double p, double k, CertifyMode mode);

/// Smallest p >= 2 (to within tol) from which certify_hprime_convex holds on
/// the whole remaining ray, scanned up to the ceiling 4k + 8. Throws
/// convergence_error naming the ceiling when no such p exists below it.
double find_pk(double k, CertifyMode mode, double tol = 1e-4);

/// Uniform sample of a derivative profile s -> h^(order)(s), order 2 or 3,
/// with unit weight (the weight is a positive factor and cannot move signs).
struct ProfileTable {
    int order = 2;
    std::vector<double> s;
    std::vector<double> value;
    double min_value = 0.0;
    double arg_min = 0.0;
};

ProfileTable scan_profile(const DerivativeBundle &bundle, int order, double s_lo, double s_hi,
                          int samples, Exec exec = Exec::Serial);

} // namespace quasisym
