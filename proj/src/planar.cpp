#include "quasisym/planar.hpp"

#include "quasisym/errors.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace quasisym {

namespace {

constexpr double kPi = 3.14159265358979323846;

double clamp_abs(double s, double cap) {
    if (s > cap) return cap;
    if (s < -cap) return -cap;
    return s;
}

} // namespace

void PlanarProblemSpec::validate() const {
    if (!(L > 0.0) || !(H > 0.0)) throw usage_error("rectangle half-width and height must be positive");
    if (n1 < 4 || n2 < 4) throw usage_error("mesh needs at least 4 cells per direction");
    if (n1 % 2 != 0) throw usage_error("n1 must be even so the mesh is mirror-symmetric");
    if (spec.dim != 2) throw usage_error("planar problems require dim = 2");
    spec.validate();
}

double PlanarField::max_abs_v() const {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double PlanarField::max_abs_u() const {
    double m = 0.0;
    for (double x : u) m = std::max(m, std::abs(x));
    return m;
}

double PlanarField::interp_u(double x, double y) const {
    const double dx = hx(), dy = hy();
    double sx = (x + L) / dx;
    double sy = y / dy;
    sx = std::clamp(sx, 0.0, static_cast<double>(n1));
    sy = std::clamp(sy, 0.0, static_cast<double>(n2));
    int i = std::min(static_cast<int>(sx), n1 - 1);
    int j = std::min(static_cast<int>(sy), n2 - 1);
    double tx = sx - i, ty = sy - j;
    const double u00 = u[idx(i, j)], u10 = u[idx(i + 1, j)];
    const double u01 = u[idx(i, j + 1)], u11 = u[idx(i + 1, j + 1)];
    return (1 - tx) * (1 - ty) * u00 + tx * (1 - ty) * u10 + (1 - tx) * ty * u01 + tx * ty * u11;
}

namespace {

double residual_core(const PlanarField &f,
                     const std::function<double(double, double, double)> &h) {
    const double cx = 1.0 / (f.hx() * f.hx());
    const double cy = 1.0 / (f.hy() * f.hy());
    double worst = 0.0;
    for (int i = 1; i < f.n1; ++i) {
        for (int j = 1; j < f.n2; ++j) {
            const std::size_t q = f.idx(i, j);
            const double lap = (2.0 * f.v[q] - f.v[f.idx(i + 1, j)] - f.v[f.idx(i - 1, j)]) * cx +
                               (2.0 * f.v[q] - f.v[f.idx(i, j + 1)] - f.v[f.idx(i, j - 1)]) * cy;
            worst = std::max(worst, std::abs(lap - h(f.x1(i), f.x2(j), f.v[q])));
        }
    }
    return worst;
}

} // namespace

double planar_residual(const PlanarField &field, const DerivativeBundle &bundle) {
    const double cap = 0.999 * bundle.transform().s_max();
    return residual_core(field, [&](double x1, double x2, double s) {
        return bundle.h_planar(x1, x2, clamp_abs(s, cap), 0);
    });
}

double planar_residual(const PlanarField &field,
                       const std::function<double(double, double, double)> &h) {
    return residual_core(field, h);
}

PlanarField reflect_field(const PlanarField &field) {
    PlanarField out = field;
    for (int i = 0; i <= field.n1; ++i) {
        for (int j = 0; j <= field.n2; ++j) {
            out.v[out.idx(i, j)] = field.v[field.idx(field.n1 - i, j)];
            out.u[out.idx(i, j)] = field.u[field.idx(field.n1 - i, j)];
        }
    }
    return out;
}

PlanarField solve_planar(const PlanarProblemSpec &problem, const DerivativeBundle &bundle,
                         const PlanarControls &controls) {
    problem.validate();
    if (!(controls.tol > 0.0)) throw usage_error("newton tolerance must be positive");
    if (controls.max_newton < 1) throw usage_error("newton iteration budget must be positive");

    const int n1 = problem.n1, n2 = problem.n2;
    const double L = problem.L, H = problem.H;
    const double dx = 2.0 * L / n1, dy = H / n2;
    const double cx = 1.0 / (dx * dx), cy = 1.0 / (dy * dy);
    const double cap = 0.999 * bundle.transform().s_max();

    const bool custom = static_cast<bool>(controls.h_override);
    auto hf = [&](double x1, double x2, double s) {
        const double sc = clamp_abs(s, cap);
        return custom ? controls.h_override(x1, x2, sc) : bundle.h_planar(x1, x2, sc, 0);
    };
    auto h1f = [&](double x1, double x2, double s) {
        const double sc = clamp_abs(s, cap);
        if (!custom) return bundle.h_planar(x1, x2, sc, 1);
        if (controls.h1_override) return controls.h1_override(x1, x2, sc);
        const double d = 1e-6 * (1.0 + std::abs(sc));
        return (controls.h_override(x1, x2, clamp_abs(sc + d, cap)) -
                controls.h_override(x1, x2, clamp_abs(sc - d, cap))) /
               (2.0 * d);
    };

    const int nun = (n1 - 1) * (n2 - 1);
    auto unk = [&](int i, int j) { return (i - 1) * (n2 - 1) + (j - 1); };

    PlanarField field;
    field.L = L;
    field.H = H;
    field.n1 = n1;
    field.n2 = n2;
    field.v.assign(static_cast<std::size_t>(n1 + 1) * (n2 + 1), 0.0);
    field.u = field.v;

    auto assemble_F = [&](const std::vector<double> &v, Eigen::VectorXd &F) {
        double worst = 0.0;
        for (int i = 1; i < n1; ++i) {
            for (int j = 1; j < n2; ++j) {
                const std::size_t q = field.idx(i, j);
                const double lap = (2.0 * v[q] - v[field.idx(i + 1, j)] - v[field.idx(i - 1, j)]) * cx +
                                   (2.0 * v[q] - v[field.idx(i, j + 1)] - v[field.idx(i, j - 1)]) * cy;
                const double r = lap - hf(field.x1(i), field.x2(j), v[q]);
                F[unk(i, j)] = r;
                worst = std::max(worst, std::abs(r));
            }
        }
        return worst;
    };

    Eigen::SparseMatrix<double> J(nun, nun);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(nun) * 5);
    auto assemble_J = [&](const std::vector<double> &v) {
        trips.clear();
        for (int i = 1; i < n1; ++i) {
            for (int j = 1; j < n2; ++j) {
                const int q = unk(i, j);
                trips.emplace_back(q, q, 2.0 * cx + 2.0 * cy - h1f(field.x1(i), field.x2(j), v[field.idx(i, j)]));
                if (i > 1) trips.emplace_back(q, unk(i - 1, j), -cx);
                if (i < n1 - 1) trips.emplace_back(q, unk(i + 1, j), -cx);
                if (j > 1) trips.emplace_back(q, unk(i, j - 1), -cy);
                if (j < n2 - 1) trips.emplace_back(q, unk(i, j + 1), -cy);
            }
        }
        J.setFromTriplets(trips.begin(), trips.end());
    };

    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    bool pattern_ready = false;

    // Seed scale: the amplitude where the nonlinearity balances the first
    // Dirichlet eigenvalue of the rectangle. Falls back to 1 when the slope
    // equation has no root in the tabulated range.
    double s_star = 1.0;
    if (!custom) {
        const double lam1 = kPi * kPi * (1.0 / (4.0 * L * L) + 1.0 / (H * H));
        const double psi_ref = problem.spec.psi.planar(0.0, H / 2.0);
        auto balance = [&](double s) { return bundle.h(psi_ref, s, 0) - lam1 * s; };
        double hi = 0.9 * bundle.transform().s_max();
        double lo = hi;
        for (int m = 0; m < 60 && balance(lo) > 0.0; ++m) lo *= 0.5;
        if (balance(lo) <= 0.0 && balance(hi) > 0.0) {
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (lo + hi);
                (balance(mid) <= 0.0 ? lo : hi) = mid;
            }
            s_star = 0.5 * (lo + hi);
        }
    }

    std::vector<double> amps = custom ? std::vector<double>{0.0} : controls.seed_factors;
    if (amps.empty()) amps = {1.0};

    std::vector<double> best_v;
    std::vector<double> hist_best;
    int iters_best = 0;
    bool have_trivial = false, have_solution = false;
    std::string fail_note;

    for (double amp : amps) {
        std::vector<double> v(field.v.size(), 0.0);
        if (!custom) {
            for (int i = 0; i <= n1; ++i) {
                for (int j = 0; j <= n2; ++j) {
                    v[field.idx(i, j)] = amp * s_star * std::cos(kPi * field.x1(i) / (2.0 * L)) *
                                         std::sin(kPi * field.x2(j) / H);
                }
            }
        }

        Eigen::VectorXd F(nun), Ft(nun);
        std::vector<double> hist;
        double res = assemble_F(v, F);
        hist.push_back(res);
        bool ok = false, broke = false;
        int it = 0;
        for (; it < controls.max_newton; ++it) {
            if (res <= controls.tol) {
                ok = true;
                break;
            }
            assemble_J(v);
            if (!pattern_ready) {
                lu.analyzePattern(J);
                pattern_ready = true;
            }
            lu.factorize(J);
            if (lu.info() != Eigen::Success) {
                fail_note = "singular jacobian";
                broke = true;
                break;
            }
            Eigen::VectorXd d = lu.solve(-F);
            if (!d.allFinite()) {
                fail_note = "non-finite newton step";
                broke = true;
                break;
            }
            double lambda = 1.0;
            std::vector<double> vt = v;
            double res_t = res;
            bool improved = false;
            while (lambda >= 1e-7) {
                for (int i = 1; i < n1; ++i)
                    for (int j = 1; j < n2; ++j)
                        vt[field.idx(i, j)] = v[field.idx(i, j)] + lambda * d[unk(i, j)];
                res_t = assemble_F(vt, Ft);
                if (std::isfinite(res_t) && res_t <= (1.0 - 0.25 * lambda) * res) {
                    improved = true;
                    break;
                }
                lambda *= 0.5;
            }
            if (!improved) {
                fail_note = "line search stalled";
                broke = true;
                break;
            }
            v.swap(vt);
            F.swap(Ft);
            res = res_t;
            hist.push_back(res);
        }
        if (!ok && !broke) fail_note = "iteration budget exhausted";
        if (!ok) continue;

        double vmax = 0.0;
        for (double x : v) vmax = std::max(vmax, std::abs(x));
        const bool trivial = !custom && vmax <= 1e-7 * std::max(1.0, s_star);
        if (trivial) {
            if (!have_solution) {
                best_v = v;
                hist_best = hist;
                iters_best = it;
                have_trivial = true;
            }
            continue;
        }
        best_v = v;
        hist_best = hist;
        iters_best = it;
        have_solution = true;
        break;
    }

    if (!have_solution && !have_trivial)
        throw convergence_error("planar newton failed for every seed amplitude (" + fail_note + ")");

    field.v = best_v;
    field.newton_iters = iters_best;
    field.residual_history = hist_best;
    field.converged = true;
    field.trivial = have_trivial && !have_solution;
    field.residual = residual_core(field, hf);
    const auto &g = bundle.transform();
    for (std::size_t q = 0; q < field.v.size(); ++q) field.u[q] = g.value(clamp_abs(field.v[q], cap));
    if (!problem.spec.constant_a && !(problem.spec.p > problem.spec.k + 1.0))
        field.warning = "p <= k + 1: the verified symmetry hypotheses do not cover this exponent pair";
    return field;
}

namespace {

/// Discrete energy bookkeeping shared by the reflection diagnostics. The
/// gradient of phi() with respect to an interior nodal value equals
/// hx*hy times the 5-point residual at that node, so first-order behavior
/// of these sums matches the scheme exactly.
struct EnergyCtx {
    const PlanarField &f;
    const DerivativeBundle &b;
    std::vector<double> psi_vals;
    double cap;
    double wx, wy, cell;

    EnergyCtx(const PlanarField &field, const DerivativeBundle &bundle)
        : f(field), b(bundle) {
        cap = 0.999 * b.transform().s_max();
        wx = f.hy() / f.hx();
        wy = f.hx() / f.hy();
        cell = f.hx() * f.hy();
        psi_vals.resize(f.v.size());
        for (int i = 0; i <= f.n1; ++i)
            for (int j = 0; j <= f.n2; ++j)
                psi_vals[f.idx(i, j)] = b.spec().psi.planar(f.x1(i), f.x2(j));
    }

    // half: 0 full rectangle, +1 right of the interface, -1 left of it.
    double phi(const std::vector<double> &z, int half) const {
        const int mid = f.n1 / 2;
        double grad = 0.0, pot = 0.0;
        for (int i = 0; i < f.n1; ++i) {
            if (half > 0 && i < mid) continue;
            if (half < 0 && i + 1 > mid) continue;
            for (int j = 0; j <= f.n2; ++j) {
                const double d = z[f.idx(i + 1, j)] - z[f.idx(i, j)];
                grad += d * d * wx;
            }
        }
        for (int i = 0; i <= f.n1; ++i) {
            if (half > 0 && i < mid) continue;
            if (half < 0 && i >= mid) continue;
            for (int j = 0; j < f.n2; ++j) {
                const double d = z[f.idx(i, j + 1)] - z[f.idx(i, j)];
                grad += d * d * wy;
            }
        }
        for (int i = 0; i <= f.n1; ++i) {
            if (half > 0 && i < mid) continue;
            if (half < 0 && i >= mid) continue;
            for (int j = 0; j <= f.n2; ++j) {
                const std::size_t q = f.idx(i, j);
                pot += b.antiderivative(psi_vals[q], clamp_abs(z[q], cap));
            }
        }
        return 0.5 * grad - pot * cell;
    }
};

} // namespace

ReflectionReport reflection_diagnostics(const PlanarField &field, const DerivativeBundle &bundle,
                                        int t_samples, double claim_tol) {
    if (field.n1 < 4 || field.n1 % 2 != 0) throw usage_error("diagnostics need an even mesh with n1 >= 4");
    if (t_samples < 3) throw usage_error("diagnostics need at least 3 curve samples");

    ReflectionReport rep;
    const int n1 = field.n1, n2 = field.n2, mid = n1 / 2;
    const std::size_t nn = field.v.size();
    const double cell = field.hx() * field.hy();

    rep.reflected.resize(nn);
    rep.wplus.assign(nn, 0.0);
    rep.wminus.assign(nn, 0.0);
    rep.wplus_neg.assign(nn, 0.0);
    rep.wminus_neg.assign(nn, 0.0);
    for (int i = 0; i <= n1; ++i) {
        for (int j = 0; j <= n2; ++j) {
            const std::size_t q = field.idx(i, j);
            const double here = field.v[q];
            const double there = field.v[field.idx(n1 - i, j)];
            rep.reflected[q] = there;
            if (i >= mid) {
                rep.wplus[q] = there - here;
                rep.wplus_neg[q] = std::max(here - there, 0.0);
            }
            if (i <= mid) {
                rep.wminus[q] = there - here;
                rep.wminus_neg[q] = std::max(here - there, 0.0);
            }
        }
    }
    for (int i = 0; i <= n1; ++i) {
        for (int j = 0; j <= n2; ++j) {
            const double a = rep.wplus[field.idx(i, j)];
            const double bm = rep.wminus[field.idx(n1 - i, j)];
            if (i >= mid)
                rep.antisym_identity_error = std::max(rep.antisym_identity_error, std::abs(a + bm));
        }
    }

    EnergyCtx ctx(field, bundle);
    const double phi0_full = ctx.phi(field.v, 0);
    const double phi0_plus = ctx.phi(field.v, +1);
    const double phi0_minus = ctx.phi(field.v, -1);

    std::vector<double> scratch(nn);
    auto psi_of = [&](double alpha, const std::vector<double> &w, double beta,
                      const std::vector<double> *w2, int half) {
        for (std::size_t q = 0; q < nn; ++q)
            scratch[q] = field.v[q] + alpha * w[q] + (w2 ? beta * (*w2)[q] : 0.0);
        const double base = half > 0 ? phi0_plus : (half < 0 ? phi0_minus : phi0_full);
        return ctx.phi(scratch, half) - base;
    };

    rep.t_grid.resize(t_samples);
    rep.psi_plus_minus.resize(t_samples);
    rep.psi_plus_plus.resize(t_samples);
    rep.psi_minus_minus.resize(t_samples);
    rep.psi_minus_plus.resize(t_samples);
    rep.deriv_formula_plus.resize(t_samples);
    rep.deriv_fd_plus.resize(t_samples);
    rep.deriv_formula_minus.resize(t_samples);
    rep.deriv_fd_minus.resize(t_samples);

    auto deriv_formula = [&](double t, const std::vector<double> &wneg, int half) {
        // d/dt of Psi_half(-t * wneg): on the support of wneg the perturbed
        // field is the convex combination (1-t) v(x) + t v(reflected x).
        double acc = 0.0;
        for (int i = 0; i <= n1; ++i) {
            if (half > 0 && i < mid) continue;
            if (half < 0 && i >= mid) continue;
            for (int j = 0; j <= n2; ++j) {
                const std::size_t q = field.idx(i, j);
                const double wn = wneg[q];
                if (wn == 0.0) continue;
                const double a = field.v[q];
                const double bref = rep.reflected[q];
                const double x1 = field.x1(i), x2 = field.x2(j);
                const double hmix = bundle.h_planar(x1, x2, clamp_abs((1.0 - t) * a + t * bref, ctx.cap), 0);
                const double ha = bundle.h_planar(x1, x2, clamp_abs(a, ctx.cap), 0);
                const double hb = bundle.h_planar(x1, x2, clamp_abs(bref, ctx.cap), 0);
                acc += (hmix - (1.0 - t) * ha - t * hb) * wn;
            }
        }
        return acc * cell;
    };

    const double fd_step = 1e-5;
    for (int m = 0; m < t_samples; ++m) {
        const double t = static_cast<double>(m) / (t_samples - 1);
        rep.t_grid[m] = t;
        rep.psi_plus_minus[m] = psi_of(-t, rep.wplus_neg, 0.0, nullptr, +1);
        rep.psi_plus_plus[m] = psi_of(+t, rep.wplus_neg, 0.0, nullptr, +1);
        rep.psi_minus_minus[m] = psi_of(-t, rep.wminus_neg, 0.0, nullptr, -1);
        rep.psi_minus_plus[m] = psi_of(+t, rep.wminus_neg, 0.0, nullptr, -1);
        rep.deriv_formula_plus[m] = deriv_formula(t, rep.wplus_neg, +1);
        rep.deriv_formula_minus[m] = deriv_formula(t, rep.wminus_neg, -1);
        rep.deriv_fd_plus[m] = (psi_of(-(t + fd_step), rep.wplus_neg, 0.0, nullptr, +1) -
                                psi_of(-(t - fd_step), rep.wplus_neg, 0.0, nullptr, +1)) /
                               (2.0 * fd_step);
        rep.deriv_fd_minus[m] = (psi_of(-(t + fd_step), rep.wminus_neg, 0.0, nullptr, -1) -
                                 psi_of(-(t - fd_step), rep.wminus_neg, 0.0, nullptr, -1)) /
                                (2.0 * fd_step);
    }
    for (int m = 0; m < t_samples; ++m) {
        rep.deriv_max_discrepancy =
            std::max({rep.deriv_max_discrepancy,
                      std::abs(rep.deriv_formula_plus[m] - rep.deriv_fd_plus[m]),
                      std::abs(rep.deriv_formula_minus[m] - rep.deriv_fd_minus[m])});
        rep.deriv_max_value =
            std::max({rep.deriv_max_value, rep.deriv_formula_plus[m], rep.deriv_formula_minus[m]});
        rep.curve_order_max_violation =
            std::max({rep.curve_order_max_violation,
                      rep.psi_plus_minus[m] - rep.psi_plus_plus[m],
                      rep.psi_minus_minus[m] - rep.psi_minus_plus[m]});
    }

    rep.grid13 = 21;
    rep.grid13_values.assign(static_cast<std::size_t>(rep.grid13) * rep.grid13, 0.0);
    std::vector<double> curve_plus(rep.grid13), curve_minus(rep.grid13);
    for (int a = 0; a < rep.grid13; ++a) {
        const double s = -1.0 + 2.0 * a / (rep.grid13 - 1);
        curve_plus[a] = psi_of(s, rep.wplus_neg, 0.0, nullptr, +1);
        curve_minus[a] = psi_of(s, rep.wminus_neg, 0.0, nullptr, -1);
    }
    for (int a = 0; a < rep.grid13; ++a) {
        const double s = -1.0 + 2.0 * a / (rep.grid13 - 1);
        for (int c = 0; c < rep.grid13; ++c) {
            const double t = -1.0 + 2.0 * c / (rep.grid13 - 1);
            const double val = psi_of(s, rep.wplus_neg, t, &rep.wminus_neg, 0);
            rep.grid13_values[static_cast<std::size_t>(a) * rep.grid13 + c] = val;
            rep.grid13_max = std::max(rep.grid13_max, val);
            rep.decomposition_max_error =
                std::max(rep.decomposition_max_error, std::abs(val - curve_plus[a] - curve_minus[c]));
        }
    }

    // Convexity sampling across the node-wise value intervals on the left half.
    {
        long pass1 = 0, pass2 = 0, total = 0;
        for (int i = 1; i < mid; ++i) {
            for (int j = 1; j < n2; ++j) {
                const std::size_t q = field.idx(i, j);
                const double a = field.v[q];
                const double bref = rep.reflected[q];
                const double psi_val = ctx.psi_vals[q];
                auto convex_on = [&](double lo, double hi) {
                    if (lo > hi) std::swap(lo, hi);
                    double worst = 0.0, span = 0.0;
                    for (int m = 0; m < 9; ++m) {
                        const double s = clamp_abs(lo + (hi - lo) * m / 8.0, ctx.cap);
                        double val;
                        try {
                            val = bundle.h(psi_val, s, 2);
                        } catch (const eval_domain_error &) {
                            continue;
                        }
                        span = std::max(span, std::abs(val));
                        worst = std::min(worst, val);
                    }
                    return worst >= -1e-10 * (1.0 + span);
                };
                ++total;
                if (convex_on(std::min(a, bref), std::max(a, bref))) ++pass1;
                if (convex_on(std::min(bref, 2.0 * a - bref), std::max(bref, 2.0 * a - bref))) ++pass2;
            }
        }
        rep.c1_fraction = total ? static_cast<double>(pass1) / total : 1.0;
        rep.c2_fraction = total ? static_cast<double>(pass2) / total : 1.0;
    }

    // Normal slope of u across the interface column.
    {
        double mn = std::numeric_limits<double>::infinity();
        double mx = -mn;
        long nonneg = 0, cnt = 0;
        const double tol = 1e-11 * std::max(1.0, field.max_abs_u() / field.hx());
        for (int j = 1; j < n2; ++j) {
            const double d = (field.u[field.idx(mid + 1, j)] - field.u[field.idx(mid - 1, j)]) /
                             (2.0 * field.hx());
            mn = std::min(mn, d);
            mx = std::max(mx, d);
            ++cnt;
            if (d >= -tol) ++nonneg;
        }
        rep.dx1_axis_min = cnt ? mn : 0.0;
        rep.dx1_axis_max = cnt ? mx : 0.0;
        rep.dx1_axis_frac_nonneg = cnt ? static_cast<double>(nonneg) / cnt : 1.0;
    }

    rep.field_residual = planar_residual(field, bundle);
    rep.solves_pde = rep.field_residual <= claim_tol;

    {
        const double p = bundle.spec().p;
        double psi_max = 0.0;
        for (double w : ctx.psi_vals) psi_max = std::max(psi_max, w);
        const double range = std::min(ctx.cap, 3.0 * field.max_abs_v() + 1.0);
        double cg = 0.0, cl = 0.0;
        for (int m = 0; m <= 200; ++m) {
            const double s = -range + 2.0 * range * m / 200.0;
            cg = std::max(cg, std::abs(bundle.h(psi_max, s, 0)) / (1.0 + std::pow(std::abs(s), p)));
            cl = std::max(cl, std::abs(bundle.h(psi_max, s, 1)));
        }
        rep.growth_constant = cg;
        rep.lipschitz_constant = cl;
        rep.claims_enabled = rep.solves_pde && std::isfinite(cg) && std::isfinite(cl);
    }
    return rep;
}

SymmetryReport symmetry_metrics(const PlanarField &field, Exec exec, int n_dirs, int n_radii,
                                int n_angles) {
    if (n_dirs < 4 || n_radii < 1 || n_angles < 8) throw usage_error("symmetry sampling resolution too small");
    SymmetryReport rep;
    const int n1 = field.n1, n2 = field.n2;
    const double umax = std::max(field.max_abs_u(), std::numeric_limits<double>::min());

    double dev = 0.0;
    for (int i = 0; i <= n1; ++i)
        for (int j = 0; j <= n2; ++j)
            dev = std::max(dev, std::abs(field.u[field.idx(i, j)] - field.u[field.idx(n1 - i, j)]));
    rep.even_deviation = dev / umax;

    // Angular monotonicity around the domain center: sample circles, then for
    // every candidate axis direction accumulate the increase of u along the
    // ordering by angular distance from that direction.
    const double cx0 = 0.0, cy0 = field.H / 2.0;
    const double rmax = 0.95 * std::min(field.L, field.H / 2.0);
    std::vector<double> samples(static_cast<std::size_t>(n_radii) * n_angles);
    for (int m = 0; m < n_radii; ++m) {
        const double r = rmax * (m + 1) / n_radii;
        for (int t = 0; t < n_angles; ++t) {
            const double th = 2.0 * kPi * t / n_angles;
            samples[static_cast<std::size_t>(m) * n_angles + t] =
                field.interp_u(cx0 + r * std::cos(th), cy0 + r * std::sin(th));
        }
    }
    std::vector<double> defect(n_dirs, 0.0);
    parallel_for(exec, static_cast<std::size_t>(n_dirs), [&](std::size_t d) {
        const double xi = 2.0 * kPi * static_cast<double>(d) / n_dirs;
        std::vector<int> order(n_angles);
        std::iota(order.begin(), order.end(), 0);
        std::vector<double> dist(n_angles);
        for (int t = 0; t < n_angles; ++t) {
            double delta = std::fmod(std::abs(2.0 * kPi * t / n_angles - xi), 2.0 * kPi);
            dist[t] = std::min(delta, 2.0 * kPi - delta);
        }
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            return dist[a] != dist[b] ? dist[a] < dist[b] : a < b;
        });
        double acc = 0.0;
        for (int m = 0; m < n_radii; ++m) {
            const double *row = samples.data() + static_cast<std::size_t>(m) * n_angles;
            for (int t = 0; t + 1 < n_angles; ++t)
                acc += std::max(0.0, row[order[t + 1]] - row[order[t]]);
        }
        defect[d] = acc / (static_cast<double>(n_radii) * n_angles * umax);
    });
    rep.foliated_deviation = std::numeric_limits<double>::infinity();
    for (int d = 0; d < n_dirs; ++d) {
        if (defect[d] < rep.foliated_deviation) {
            rep.foliated_deviation = defect[d];
            rep.best_xi_angle = 2.0 * kPi * d / n_dirs;
        }
    }

    // Near-critical mesh points of u, with a gradient threshold tied to the
    // mesh size through the measured second differences.
    const double dx = field.hx(), dy = field.hy();
    double d2max = 0.0;
    for (int i = 1; i < n1; ++i) {
        for (int j = 1; j < n2; ++j) {
            const std::size_t q = field.idx(i, j);
            const double dxx = (field.u[field.idx(i + 1, j)] - 2 * field.u[q] + field.u[field.idx(i - 1, j)]) / (dx * dx);
            const double dyy = (field.u[field.idx(i, j + 1)] - 2 * field.u[q] + field.u[field.idx(i, j - 1)]) / (dy * dy);
            d2max = std::max(d2max, std::abs(dxx) + std::abs(dyy));
        }
    }
    rep.eps_grad = 0.5 * (dx + dy) * d2max;
    std::vector<CriticalPoint> hits;
    for (int i = 1; i < n1; ++i) {
        for (int j = 1; j < n2; ++j) {
            const double gx = (field.u[field.idx(i + 1, j)] - field.u[field.idx(i - 1, j)]) / (2 * dx);
            const double gy = (field.u[field.idx(i, j + 1)] - field.u[field.idx(i, j - 1)]) / (2 * dy);
            const double gn = std::hypot(gx, gy);
            if (gn <= rep.eps_grad)
                hits.push_back({field.x1(i), field.x2(j), gn, std::abs(field.x1(i))});
        }
    }
    rep.critical_count = static_cast<int>(hits.size());
    // keep the flattest points so the cap never crowds out the extremum
    const std::size_t cap = std::min<std::size_t>(64, hits.size());
    std::partial_sort(hits.begin(), hits.begin() + cap, hits.end(),
                      [](const CriticalPoint &a, const CriticalPoint &b) { return a.grad_norm < b.grad_norm; });
    hits.resize(cap);
    rep.critical_points = std::move(hits);

    {
        const int mid = n1 / 2;
        double mn = std::numeric_limits<double>::infinity();
        double mx = -mn;
        long nonneg = 0, cnt = 0;
        const double tol = 1e-11 * std::max(1.0, field.max_abs_u() / dx);
        for (int j = 1; j < n2; ++j) {
            const double d = (field.u[field.idx(mid + 1, j)] - field.u[field.idx(mid - 1, j)]) / (2 * dx);
            mn = std::min(mn, d);
            mx = std::max(mx, d);
            ++cnt;
            if (d >= -tol) ++nonneg;
        }
        rep.dx1_axis_min = cnt ? mn : 0.0;
        rep.dx1_axis_max = cnt ? mx : 0.0;
        rep.dx1_axis_frac_nonneg = cnt ? static_cast<double>(nonneg) / cnt : 1.0;
    }
    return rep;
}

PlanarField rasterize_radial(const RadialSolution &sol, const DerivativeBundle &bundle, int cells) {
    if (cells < 4 || cells % 2 != 0) throw usage_error("raster needs an even cell count >= 4");
    const double R = sol.domain.outer;
    PlanarField f;
    f.L = R;
    f.H = 2.0 * R;
    f.n1 = cells;
    f.n2 = cells;
    f.v.assign(static_cast<std::size_t>(cells + 1) * (cells + 1), 0.0);
    f.u = f.v;
    const auto &g = bundle.transform();
    const double cap = 0.999 * g.s_max();
    for (int i = 0; i <= cells; ++i) {
        for (int j = 0; j <= cells; ++j) {
            const double x = f.x1(i), y = f.x2(j);
            const double rho = std::hypot(x, y - R);
            if (rho < sol.domain.inner || rho > sol.domain.outer) continue;
            const double val = sol.sample(rho);
            f.v[f.idx(i, j)] = val;
            f.u[f.idx(i, j)] = g.value(clamp_abs(val, cap));
        }
    }
    f.converged = true;
    f.residual = sol.scheme_residual;
    return f;
}

} // namespace quasisym
