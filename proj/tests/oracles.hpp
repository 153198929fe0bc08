// Test-only oracles, independent of the library code paths they check.
#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "bandsparse/dict.hpp"
#include "bandsparse/numerics.hpp"

namespace oracles {

using bandsparse::CMatrix;
using bandsparse::CVector;
using bandsparse::cxd;

// Naive triple-loop conjugate-dot A^H y.
inline CVector hermitian_product_naive(const CMatrix& a, const CVector& y) {
    CVector out(a.cols(), cxd(0.0));
    for (std::size_t j = 0; j < a.cols(); ++j)
        for (std::size_t i = 0; i < a.rows(); ++i)
            out[j] += std::conj(a(i, j)) * y[i];
    return out;
}

// Dense solve by Gauss-Jordan elimination at extended precision.
inline CVector solve_extended(const CMatrix& g, const CVector& b) {
    using cxl = std::complex<long double>;
    const std::size_t n = g.rows();
    std::vector<std::vector<cxl>> m(n, std::vector<cxl>(n + 1));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j)
            m[i][j] = cxl(g(i, j).real(), g(i, j).imag());
        m[i][n] = cxl(b[i].real(), b[i].imag());
    }
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
        std::swap(m[col], m[pivot]);
        const cxl p = m[col][col];
        for (std::size_t j = col; j <= n; ++j) m[col][j] /= p;
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const cxl f = m[r][col];
            for (std::size_t j = col; j <= n; ++j) m[r][j] -= f * m[col][j];
        }
    }
    CVector x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = cxd(static_cast<double>(m[i][n].real()), static_cast<double>(m[i][n].imag()));
    return x;
}

// Kronecker product by the (i, j) index formula.
inline cxd kronecker_entry(const CMatrix& a, const CMatrix& b, std::size_t i, std::size_t j) {
    const std::size_t ia = i / b.rows(), ib = i % b.rows();
    const std::size_t ja = j / b.cols(), jb = j % b.cols();
    return a(ia, ja) * b(ib, jb);
}

// Adaptive Simpson quadrature of int_{f_lo}^{f_hi} e^{2 i pi f t} df.
namespace detail {
inline cxd integrand(double f, double t) {
    const double phase = 2.0 * std::numbers::pi * f * t;
    return cxd(std::cos(phase), std::sin(phase));
}

inline cxd simpson(double a, double b, cxd fa, cxd fm, cxd fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline cxd adapt(double a, double b, cxd fa, cxd fm, cxd fb, cxd whole, double t, double tol,
                 int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const cxd flm = integrand(lm, t), frm = integrand(rm, t);
    const cxd left = simpson(a, m, fa, flm, fm);
    const cxd right = simpson(m, b, fm, frm, fb);
    const cxd delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adapt(a, m, fa, flm, fm, left, t, tol / 2.0, depth - 1) +
           adapt(m, b, fm, frm, fb, right, t, tol / 2.0, depth - 1);
}
}  // namespace detail

inline cxd wideband_integral(double f_lo, double f_hi, double t, double tol = 1e-13) {
    // Pre-panel to at most a quarter cycle of e^{2 i pi f t} per panel, so the
    // adaptive refinement never aliases a whole number of oscillations.
    const double cycles = std::abs(t) * (f_hi - f_lo);
    const int panels = std::min(20000, std::max(1, static_cast<int>(std::ceil(4.0 * cycles)) + 1));
    cxd total = 0.0;
    for (int k = 0; k < panels; ++k) {
        const double a = f_lo + (f_hi - f_lo) * k / panels;
        const double b = f_lo + (f_hi - f_lo) * (k + 1) / panels;
        const cxd fa = detail::integrand(a, t);
        const cxd fb = detail::integrand(b, t);
        const double m = 0.5 * (a + b);
        const cxd fm = detail::integrand(m, t);
        const cxd whole = detail::simpson(a, b, fa, fm, fb);
        total += detail::adapt(a, b, fa, fm, fb, whole, t, tol / panels, 40);
    }
    return total;
}

// Coordinate descent for min 1/2 ||y - A z||^2 + lambda sum |z_i|, run to a
// tight fixed point; independent of the ADMM path.
inline CVector lasso_coordinate_descent(const CMatrix& a, const CVector& y, double lambda,
                                        int max_sweeps = 200000, double tol = 1e-13) {
    const std::size_t n = a.rows(), p = a.cols();
    CVector z(p, cxd(0.0));
    CVector residual = y;  // y - A z
    std::vector<double> colsq(p, 0.0);
    for (std::size_t j = 0; j < p; ++j)
        for (std::size_t i = 0; i < n; ++i) colsq[j] += std::norm(a(i, j));
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double max_change = 0.0;
        for (std::size_t j = 0; j < p; ++j) {
            cxd rho = 0.0;
            for (std::size_t i = 0; i < n; ++i) rho += std::conj(a(i, j)) * residual[i];
            rho += colsq[j] * z[j];
            const double mag = std::abs(rho);
            cxd znew = 0.0;
            if (mag > lambda) znew = rho * ((mag - lambda) / mag) / colsq[j];
            const cxd dz = znew - z[j];
            if (std::abs(dz) > 0.0) {
                for (std::size_t i = 0; i < n; ++i) residual[i] -= a(i, j) * dz;
                z[j] = znew;
            }
            max_change = std::max(max_change, std::abs(dz));
        }
        if (max_change < tol) break;
    }
    return z;
}

inline double lasso_objective(const CMatrix& a, const CVector& y, const CVector& z,
                              double lambda) {
    double fit = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        cxd az = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) az += a(i, j) * z[j];
        fit += std::norm(y[i] - az);
    }
    double l1 = 0.0;
    for (const cxd& v : z) l1 += std::abs(v);
    return 0.5 * fit + lambda * l1;
}

// DTFT magnitude-squared integral of a real sequence over [lo, hi] by
// composite Simpson on a fine grid.
inline double spectrum_energy(const std::vector<double>& v, double lo, double hi,
                              int panels = 4096) {
    auto power = [&](double f) {
        cxd acc = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double phase = -2.0 * std::numbers::pi * f * static_cast<double>(i);
            acc += v[i] * cxd(std::cos(phase), std::sin(phase));
        }
        return std::norm(acc);
    };
    const double h = (hi - lo) / panels;
    double acc = power(lo) + power(hi);
    for (int i = 1; i < panels; ++i) acc += power(lo + i * h) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

inline bandsparse::CMatrix random_matrix(std::size_t rows, std::size_t cols,
                                         bandsparse::Rng& rng) {
    bandsparse::CMatrix a(rows, cols);
    for (std::size_t j = 0; j < cols; ++j)
        for (std::size_t i = 0; i < rows; ++i) a(i, j) = rng.complex_gaussian(1.0);
    return a;
}

inline CVector random_vector(std::size_t n, bandsparse::Rng& rng) {
    CVector y(n);
    for (auto& v : y) v = rng.complex_gaussian(1.0);
    return y;
}

}  // namespace oracles
