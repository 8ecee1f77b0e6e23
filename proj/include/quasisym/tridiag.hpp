#pragma once

#include <cstddef>
#include <vector>

namespace quasisym {

/// Symmetric tridiagonal matrix: diag[0..n), off[0..n-1) couples i and i+1.
struct SymTridiag {
    std::vector<double> diag;
    std::vector<double> off;
    std::size_t size() const { return diag.size(); }
};

/// Number of eigenvalues strictly below x (Sturm sequence / LDL^T pivot
/// count, with the standard tiny-pivot safeguard).
int eigen_count_below(const SymTridiag &T, double x);

/// Smallest eigenvalue by bisection inside the Gershgorin bounds, to
/// absolute tolerance tol * max(1, |bound|).
double smallest_eigenvalue(const SymTridiag &T, double tol = 1e-12);

/// Solve a general tridiagonal system (lower, diag, upper) in place with
/// partial pivoting. lower[i] couples row i+1 to column i, upper[i] couples
/// row i to column i+1. Returns false if the matrix is numerically singular.
bool solve_tridiag(std::vector<double> lower, std::vector<double> diag,
                   std::vector<double> upper, std::vector<double> &rhs);

} // namespace quasisym
