#include "quasisym/nonlin.hpp"

#include "quasisym/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace quasisym {

namespace {
double sgn(double t) { return t > 0 ? 1.0 : (t < 0 ? -1.0 : 0.0); }
} // namespace

// ---------------------------------------------------------------------------
// Weight

void Weight::validate() const {
    if (!(value >= 0.0))
        throw usage_error("weight: value must be nonnegative");
    switch (kind) {
    case Kind::Constant:
        break;
    case Kind::RadialPower:
        if (!(exponent >= 0.0))
            throw usage_error("weight: radial power exponent must be nonnegative");
        break;
    case Kind::EvenBump:
        if (!(bump >= 0.0))
            throw usage_error("weight: bump amplitude must be nonnegative");
        if (!(halfwidth > 0.0))
            throw usage_error("weight: bump halfwidth must be positive");
        break;
    }
}

double Weight::radial(double r) const {
    switch (kind) {
    case Kind::Constant:
        return value;
    case Kind::RadialPower:
        return exponent == 0.0 ? value : value * std::pow(r, exponent);
    case Kind::EvenBump:
        throw usage_error("weight: the even bump profile is not radial");
    }
    return value;
}

double Weight::planar(double x1, double x2) const {
    switch (kind) {
    case Kind::Constant:
        return value;
    case Kind::RadialPower:
        return radial(std::hypot(x1, x2));
    case Kind::EvenBump: {
        double q = x1 / halfwidth;
        return value * (1.0 + bump * std::max(0.0, 1.0 - q * q));
    }
    }
    return value;
}

// ---------------------------------------------------------------------------
// NonlinearitySpec

void NonlinearitySpec::validate() const {
    if (constant_a) {
        if (!(a_const > 0.0))
            throw usage_error("spec: constant coefficient must be positive");
    } else if (!(k > 1.0)) {
        throw usage_error("spec: coefficient exponent k must exceed 1");
    }
    if (!(p > 1.0))
        throw usage_error("spec: source exponent p must exceed 1");
    if (dim < 2)
        throw usage_error("spec: dimension must be at least 2");
    psi.validate();
}

double NonlinearitySpec::a(double t) const {
    if (constant_a)
        return a_const;
    return 1.0 + std::pow(std::abs(t), k);
}

double NonlinearitySpec::a1(double t) const {
    if (constant_a)
        return 0.0;
    if (t == 0.0)
        return 0.0; // k > 1
    return k * std::pow(std::abs(t), k - 1.0) * sgn(t);
}

double NonlinearitySpec::a2(double t) const {
    if (constant_a)
        return 0.0;
    if (t == 0.0) {
        if (k > 2.0)
            return 0.0;
        if (k == 2.0)
            return 2.0;
        throw eval_domain_error("spec: a'' is singular at t = 0 for k < 2");
    }
    return k * (k - 1.0) * std::pow(std::abs(t), k - 2.0);
}

double NonlinearitySpec::a3(double t) const {
    if (constant_a)
        return 0.0;
    if (t == 0.0) {
        if (k > 3.0)
            return 0.0;
        if (k == 3.0)
            return 6.0; // one-sided from t > 0
        throw eval_domain_error("spec: a''' does not exist at t = 0 for k < 3");
    }
    return k * (k - 1.0) * (k - 2.0) * std::pow(std::abs(t), k - 3.0) * sgn(t);
}

double NonlinearitySpec::f(double psi_val, double t, int order) const {
    if (order < 0 || order > 3)
        throw usage_error("spec: source derivative order must lie in 0..3");
    const double at = std::abs(t);
    if (sign == SourceSign::PositivePart && t < 0.0)
        return 0.0;
    if (t == 0.0) {
        // Limit from t > 0; both catalog entries agree there.
        double need = static_cast<double>(order);
        if (p > need)
            return 0.0;
        if (p == need) {
            double c = 1.0;
            for (int j = 0; j < order; ++j)
                c *= p - j;
            return psi_val * c; // p! since p == order
        }
        throw eval_domain_error("spec: source derivative of order " + std::to_string(order) +
                                " does not exist at t = 0 for p < " + std::to_string(order));
    }
    double sg = sgn(t);
    switch (order) {
    case 0:
        return psi_val * std::pow(at, p - 1.0) * t;
    case 1:
        return psi_val * p * std::pow(at, p - 1.0);
    case 2:
        return psi_val * p * (p - 1.0) * std::pow(at, p - 2.0) * sg;
    default:
        return psi_val * p * (p - 1.0) * (p - 2.0) * std::pow(at, p - 3.0);
    }
}

double NonlinearitySpec::F(double psi_val, double t) const {
    if (sign == SourceSign::PositivePart && t <= 0.0)
        return 0.0;
    return psi_val * std::pow(std::abs(t), p + 1.0) / (p + 1.0);
}

// ---------------------------------------------------------------------------
// GFunction

double GFunction::coeff_at(double g) const {
    if (const_a_)
        return a_const_;
    return 1.0 + std::pow(std::abs(g), k_);
}

double GFunction::value_pos(double s) const {
    if (exact_)
        return s / std::sqrt(a_const_);
    auto it = std::upper_bound(s_.begin(), s_.end(), s);
    std::size_t hi = std::min<std::size_t>(it - s_.begin(), s_.size() - 1);
    if (hi == 0)
        hi = 1;
    std::size_t lo = hi - 1;
    return hermite_value(s_[lo], g_[lo], dg_[lo], s_[hi], g_[hi], dg_[hi], s);
}

double GFunction::value(double s) const {
    double as = std::abs(s);
    if (as > s_max_ * (1.0 + 1e-12))
        throw tabulation_range_error("g: argument " + std::to_string(s) +
                                     " outside tabulated range [-" + std::to_string(s_max_) +
                                     ", " + std::to_string(s_max_) + "]");
    double v = value_pos(std::min(as, s_max_));
    return s < 0 ? -v : v;
}

double GFunction::slope(double s) const {
    return 1.0 / std::sqrt(coeff_at(value(s)));
}

double GFunction::inverse(double u) const {
    double au = std::abs(u);
    if (au > u_max_ * (1.0 + 1e-12))
        throw tabulation_range_error("g inverse: argument " + std::to_string(u) +
                                     " outside attained range [-" + std::to_string(u_max_) +
                                     ", " + std::to_string(u_max_) + "]");
    if (exact_)
        return u * std::sqrt(a_const_);
    if (au == 0.0)
        return 0.0;
    au = std::min(au, u_max_);

    auto it = std::upper_bound(g_.begin(), g_.end(), au);
    std::size_t hi = std::min<std::size_t>(it - g_.begin(), g_.size() - 1);
    if (hi == 0)
        hi = 1;
    double lo_s = s_[hi - 1], hi_s = s_[hi];
    double s = lo_s + (hi_s - lo_s) * (au - g_[hi - 1]) /
                          std::max(g_[hi] - g_[hi - 1], std::numeric_limits<double>::min());
    const double tol = 1e-15 * std::max(1.0, au);
    for (int iter = 0; iter < 80; ++iter) {
        double r = value_pos(s) - au;
        if (std::abs(r) <= tol)
            break;
        if (r > 0)
            hi_s = s;
        else
            lo_s = s;
        double step = r * std::sqrt(coeff_at(value_pos(s)));
        double next = s - step;
        if (!(next > lo_s) || !(next < hi_s))
            next = 0.5 * (lo_s + hi_s);
        s = next;
    }
    return u < 0 ? -s : s;
}

GFunction solve_g(const NonlinearitySpec &spec, double s_max, double ode_tol) {
    spec.validate();
    if (!(s_max > 0.0))
        throw usage_error("solve_g: s_max must be positive");
    if (!(ode_tol > 0.0))
        throw usage_error("solve_g: ode_tol must be positive");

    GFunction g;
    g.const_a_ = spec.constant_a;
    g.a_const_ = spec.a_const;
    g.k_ = spec.k;
    g.s_max_ = s_max;
    if (spec.constant_a) {
        g.exact_ = true;
        g.u_max_ = s_max / std::sqrt(spec.a_const);
        return g;
    }

    g.s_.push_back(0.0);
    g.g_.push_back(0.0);
    g.dg_.push_back(1.0); // a(0) = 1

    auto rhs = [&spec](double, const OdeState<1> &y, OdeState<1> &dy) {
        dy[0] = 1.0 / std::sqrt(1.0 + std::pow(std::abs(y[0]), spec.k));
    };
    OdeOptions opt;
    opt.tol = ode_tol;
    opt.max_step = 1e-2;
    integrate_rk45<1>(rhs, 0.0, {0.0}, s_max, opt,
                      [&g](double, const OdeState<1> &, const OdeState<1> &, double t1,
                           const OdeState<1> &y1, const OdeState<1> &f1) {
                          g.s_.push_back(t1);
                          g.g_.push_back(y1[0]);
                          g.dg_.push_back(f1[0]);
                          return true;
                      });
    g.s_.back() = s_max; // integrator lands within roundoff of s_max
    g.u_max_ = g.g_.back();
    return g;
}

// ---------------------------------------------------------------------------
// DerivativeBundle

DerivativeBundle::DerivativeBundle(NonlinearitySpec spec, GFunction g)
    : spec_(std::move(spec)), g_(std::move(g)) {}

double DerivativeBundle::h(double psi_val, double s, int order) const {
    if (order < 0 || order > 3)
        throw usage_error("bundle: derivative order must lie in 0..3");

    if (s == 0.0) {
        // Exact limits from s > 0. Orders 0-1 vanish for every p > 1; the
        // higher orders reduce to pure source derivatives because a'(0) = 0.
        if (order <= 1)
            return 0.0;
        if (!spec_.constant_a && spec_.k < 2.0)
            throw eval_domain_error("bundle: orders 2-3 at s = 0 need k >= 2 "
                                    "(a'' is singular at the origin otherwise)");
        double a0 = spec_.a(0.0);
        double fd = spec_.f(psi_val, 0.0, order);
        return order == 2 ? fd * std::pow(a0, -1.5) : fd / (a0 * a0);
    }

    const double t = g_.value(s);
    const double a = spec_.a(t);
    const double f0 = spec_.f(psi_val, t, 0);
    if (order == 0)
        return f0 / std::sqrt(a);

    const double a1 = spec_.a1(t);
    const double f1 = spec_.f(psi_val, t, 1);
    if (order == 1)
        return (2.0 * f1 * a - f0 * a1) / (2.0 * a * a);

    const double a2 = spec_.a2(t);
    const double f2 = spec_.f(psi_val, t, 2);
    const double theta = 2.0 * f2 * a * a - 3.0 * f1 * a1 * a - f0 * a2 * a + 2.0 * f0 * a1 * a1;
    if (order == 2)
        return 0.5 * theta / std::pow(a, 3.5);

    const double a3 = spec_.a3(t);
    const double f3 = spec_.f(psi_val, t, 3);
    const double theta1 = 2.0 * f3 * a * a + 4.0 * f2 * a1 * a - 3.0 * f2 * a1 * a -
                          3.0 * f1 * a2 * a - 3.0 * f1 * a1 * a1 - f1 * a2 * a -
                          f0 * a3 * a - f0 * a2 * a1 + 2.0 * f1 * a1 * a1 +
                          4.0 * f0 * a1 * a2;
    return (2.0 * theta1 * a - 7.0 * a1 * theta) / (4.0 * std::pow(a, 5.0));
}

double DerivativeBundle::h_radial(double r, double s, int order) const {
    return h(spec_.psi.radial(r), s, order);
}

double DerivativeBundle::h_planar(double x1, double x2, double s, int order) const {
    return h(spec_.psi.planar(x1, x2), s, order);
}

double DerivativeBundle::antiderivative(double psi_val, double s) const {
    return spec_.F(psi_val, g_.value(s));
}

DerivativeBundle make_bundle(NonlinearitySpec spec, double s_max, double ode_tol) {
    GFunction g = solve_g(spec, s_max, ode_tol);
    return DerivativeBundle(std::move(spec), std::move(g));
}

// ---------------------------------------------------------------------------
// Growth

GrowthReport validate_growth(const NonlinearitySpec &spec) {
    spec.validate();
    GrowthReport rep;
    double k_eff = spec.constant_a ? 0.0 : spec.k;
    if (spec.dim <= 2)
        rep.critical_exponent = std::numeric_limits<double>::infinity();
    else
        rep.critical_exponent = ((k_eff + 1.0) * spec.dim + 2.0) / (spec.dim - 2.0);
    rep.subcritical = spec.p < rep.critical_exponent;
    rep.superlinear = spec.p > k_eff + 1.0;
    rep.half_k = spec.p > 0.5 * k_eff;
    rep.k_at_least_two = spec.constant_a || spec.k >= 2.0;
    return rep;
}

} // namespace quasisym
