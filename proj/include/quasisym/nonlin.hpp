#pragma once

#include "quasisym/errors.hpp"

#include <vector>

namespace quasisym {

/// Sign convention of the source term in s.
enum class SourceSign {
    PositivePart, // psi(x) * max(s,0)^p   (positive solutions)
    OddPower      // psi(x) * |s|^(p-1) s  (sign-changing solutions)
};

/// Spatial weight multiplying the source. Every catalog entry is nonnegative
/// and even in x1, and does not decrease toward the x1 = 0 hyperplane.
struct Weight {
    enum class Kind {
        Constant,    // value
        RadialPower, // value * |x|^exponent
        EvenBump     // value * (1 + bump * max(0, 1 - (x1/halfwidth)^2))
    };
    Kind kind = Kind::Constant;
    double value = 1.0;
    double exponent = 0.0;
    double bump = 0.0;
    double halfwidth = 1.0;

    void validate() const;
    /// Weight at radius r (radial problems). EvenBump is not radial.
    double radial(double r) const;
    /// Weight at a planar point.
    double planar(double x1, double x2) const;
};

/// Problem data: diffusion coefficient family a, source exponent p, weight,
/// space dimension. The coefficient is either a(t) = 1 + |t|^k with k > 1 or
/// the constant a_const > 0.
struct NonlinearitySpec {
    double k = 2.0;
    double p = 2.0;
    int dim = 3;
    SourceSign sign = SourceSign::PositivePart;
    Weight psi{};
    bool constant_a = false;
    double a_const = 1.0;

    void validate() const;

    double a(double t) const;
    double a1(double t) const; // da/dt; t != 0 or k > 1 handled exactly
    double a2(double t) const;
    double a3(double t) const;

    /// Source and its t-derivatives with the weight replaced by psi_val.
    double f(double psi_val, double t, int order) const;
    /// Antiderivative of the source in t, vanishing at t = 0.
    double F(double psi_val, double t) const;
};

/// Change of variable u = g(v) defined by g' = a(g)^{-1/2}, g(0) = 0, odd
/// extension to s < 0. Constant coefficient uses the exact linear form;
/// otherwise values come from the integrator nodes with cubic Hermite
/// interpolation in between (node spacing capped at 1e-2) and the slope is
/// recovered exactly from a(g(s)).
class GFunction {
public:
    double value(double s) const;
    double slope(double s) const;
    /// Inverse map (safeguarded Newton); round-trips to ~1e-14 relative.
    double inverse(double u) const;

    double s_max() const { return s_max_; }
    double u_max() const { return u_max_; }
    bool exact() const { return exact_; }
    const std::vector<double> &nodes() const { return s_; }
    const std::vector<double> &node_values() const { return g_; }

private:
    friend GFunction solve_g(const NonlinearitySpec &, double, double);
    bool exact_ = false;
    bool const_a_ = false;
    double a_const_ = 1.0;
    double k_ = 2.0;
    double s_max_ = 0.0, u_max_ = 0.0;
    std::vector<double> s_, g_, dg_;

    double coeff_at(double g) const;
    double value_pos(double s) const;
};

/// Tabulate the change of variable on [-s_max, s_max].
GFunction solve_g(const NonlinearitySpec &spec, double s_max = 20.0, double ode_tol = 1e-12);

/// Transformed nonlinearity h(x, s) = f(x, g(s)) a(g(s))^{-1/2} and its
/// s-derivatives through order 3, in closed form through the chain rule
/// (no divided differences). The weight enters as a pure factor, so callers
/// pass its value at the point of interest.
class DerivativeBundle {
public:
    DerivativeBundle(NonlinearitySpec spec, GFunction g);

    const NonlinearitySpec &spec() const { return spec_; }
    const GFunction &transform() const { return g_; }

    /// d^order/ds^order of h at (psi_val, s), order in 0..3. At s = 0 the
    /// value returned is the limit from s > 0 (the active side for the
    /// positive-part source); orders 2-3 at s = 0 require k >= 2 when the
    /// coefficient is non-constant, since a'' is singular there otherwise.
    double h(double psi_val, double s, int order) const;
    double h_radial(double r, double s, int order) const;
    double h_planar(double x1, double x2, double s, int order) const;

    /// Primitive of h in s vanishing at 0; equals F(x, g(s)) exactly.
    double antiderivative(double psi_val, double s) const;

private:
    NonlinearitySpec spec_;
    GFunction g_;
};

DerivativeBundle make_bundle(NonlinearitySpec spec, double s_max = 20.0, double ode_tol = 1e-12);

/// Growth diagnostics: the critical exponent ((k+1)N + 2)/(N-2) (infinite in
/// dimension 2) and the structural flags the qualitative results lean on.
struct GrowthReport {
    double critical_exponent = 0.0;
    bool subcritical = false;
    bool superlinear = false;   // p > k + 1
    bool half_k = false;        // p > k / 2
    bool k_at_least_two = false;
};

GrowthReport validate_growth(const NonlinearitySpec &spec);

} // namespace quasisym
