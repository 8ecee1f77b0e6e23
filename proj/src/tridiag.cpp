#include "quasisym/tridiag.hpp"

#include "quasisym/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace quasisym {

int eigen_count_below(const SymTridiag &T, double x) {
    const std::size_t n = T.size();
    if (n == 0)
        return 0;
    if (T.off.size() + 1 != n)
        throw usage_error("eigen_count_below: off-diagonal length must be size-1");

    int count = 0;
    double q = T.diag[0] - x;
    if (q < 0)
        ++count;
    for (std::size_t i = 1; i < n; ++i) {
        double e2 = T.off[i - 1] * T.off[i - 1];
        if (q == 0.0)
            q = -std::numeric_limits<double>::min() * 1e16; // treat exact tie as negative
        q = T.diag[i] - x - e2 / q;
        if (q < 0)
            ++count;
    }
    return count;
}

double smallest_eigenvalue(const SymTridiag &T, double tol) {
    const std::size_t n = T.size();
    if (n == 0)
        throw usage_error("smallest_eigenvalue: empty matrix");

    double lo = T.diag[0], hi = T.diag[0];
    for (std::size_t i = 0; i < n; ++i) {
        double r = 0;
        if (i > 0)
            r += std::abs(T.off[i - 1]);
        if (i + 1 < n)
            r += std::abs(T.off[i]);
        lo = std::min(lo, T.diag[i] - r);
        hi = std::max(hi, T.diag[i] + r);
    }
    // Invariant: count_below(lo) = 0, count_below(hi + eps) >= 1.
    double scale = std::max({1.0, std::abs(lo), std::abs(hi)});
    hi = hi + scale * 1e-12;
    for (int iter = 0; iter < 200 && hi - lo > tol * scale; ++iter) {
        double mid = 0.5 * (lo + hi);
        if (eigen_count_below(T, mid) >= 1)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

bool solve_tridiag(std::vector<double> lower, std::vector<double> diag,
                   std::vector<double> upper, std::vector<double> &rhs) {
    const std::size_t n = diag.size();
    if (n == 0)
        return false;
    if (lower.size() + 1 != n || upper.size() + 1 != n || rhs.size() != n)
        throw usage_error("solve_tridiag: inconsistent band lengths");

    // Gaussian elimination with partial pivoting creates a second
    // superdiagonal; store it in extra.
    std::vector<double> extra(n, 0.0);
    std::vector<double> d = std::move(diag), u = std::move(upper), l = std::move(lower);
    u.push_back(0.0);

    for (std::size_t i = 0; i + 1 < n; ++i) {
        double below = l[i];
        if (std::abs(below) > std::abs(d[i])) {
            std::swap(d[i], l[i]);
            std::swap(u[i], d[i + 1]);
            std::swap(extra[i], u[i + 1]);
            std::swap(rhs[i], rhs[i + 1]);
            below = l[i];
        }
        if (d[i] == 0.0)
            return false;
        double m = below / d[i];
        d[i + 1] -= m * u[i];
        u[i + 1] -= m * extra[i];
        rhs[i + 1] -= m * rhs[i];
    }
    if (d[n - 1] == 0.0)
        return false;

    for (std::size_t ii = n; ii-- > 0;) {
        double s = rhs[ii];
        if (ii + 1 < n)
            s -= u[ii] * rhs[ii + 1];
        if (ii + 2 < n)
            s -= extra[ii] * rhs[ii + 2];
        rhs[ii] = s / d[ii];
    }
    return true;
}

} // namespace quasisym
