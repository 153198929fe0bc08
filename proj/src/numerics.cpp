#include "bandsparse/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace bandsparse {

namespace {
constexpr std::size_t kParallelCutoff = 16384;  // entries below this run serial anyway
}

CMatrix CMatrix::identity(std::size_t n) {
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

CMatrix CMatrix::from_columns(const CMatrix& a, const std::vector<std::size_t>& cols) {
    CMatrix m(a.rows(), cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
        if (cols[j] >= a.cols()) throw std::invalid_argument("from_columns: index out of range");
        const cxd* src = a.col(cols[j]);
        cxd* dst = m.col(j);
        for (std::size_t i = 0; i < a.rows(); ++i) dst[i] = src[i];
    }
    return m;
}

bool CMatrix::all_finite() const {
    for (const cxd& v : data_)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

bool all_finite(const CVector& v) {
    for (const cxd& x : v)
        if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return false;
    return true;
}

double norm2(const CVector& v) {
    double s = 0.0;
    for (const cxd& x : v) s += std::norm(x);
    return std::sqrt(s);
}

CVector hermitian_product_serial(const CMatrix& a, const CVector& y) {
    if (a.rows() != y.size()) throw std::invalid_argument("hermitian_product: dimension mismatch");
    CVector out(a.cols());
    for (std::size_t j = 0; j < a.cols(); ++j) {
        const cxd* c = a.col(j);
        cxd acc = 0.0;
        for (std::size_t i = 0; i < a.rows(); ++i) acc += std::conj(c[i]) * y[i];
        out[j] = acc;
    }
    return out;
}

CVector hermitian_product(const CMatrix& a, const CVector& y) {
    if (a.rows() != y.size()) throw std::invalid_argument("hermitian_product: dimension mismatch");
    CVector out(a.cols());
    const std::ptrdiff_t cols = static_cast<std::ptrdiff_t>(a.cols());
#pragma omp parallel for schedule(static) if (a.size() > kParallelCutoff)
    for (std::ptrdiff_t j = 0; j < cols; ++j) {
        const cxd* c = a.col(j);
        cxd acc = 0.0;
        for (std::size_t i = 0; i < a.rows(); ++i) acc += std::conj(c[i]) * y[i];
        out[j] = acc;
    }
    return out;
}

CVector matvec_serial(const CMatrix& a, const CVector& x) {
    if (a.cols() != x.size()) throw std::invalid_argument("matvec: dimension mismatch");
    CVector out(a.rows(), cxd(0.0));
    for (std::size_t j = 0; j < a.cols(); ++j) {
        const cxd* c = a.col(j);
        const cxd xj = x[j];
        for (std::size_t i = 0; i < a.rows(); ++i) out[i] += c[i] * xj;
    }
    return out;
}

CVector matvec(const CMatrix& a, const CVector& x) {
    if (a.cols() != x.size()) throw std::invalid_argument("matvec: dimension mismatch");
    CVector out(a.rows(), cxd(0.0));
    const std::size_t rows = a.rows();
#pragma omp parallel if (a.size() > kParallelCutoff)
    {
#ifdef _OPENMP
        // Each thread owns a row range; per-row accumulation order stays the
        // serial column order, so the result is bit-identical to matvec_serial.
#pragma omp for schedule(static)
        for (std::ptrdiff_t i0 = 0; i0 < static_cast<std::ptrdiff_t>(rows); i0 += 256) {
            const std::size_t hi = std::min(rows, static_cast<std::size_t>(i0) + 256);
            for (std::size_t j = 0; j < a.cols(); ++j) {
                const cxd* c = a.col(j);
                const cxd xj = x[j];
                for (std::size_t i = static_cast<std::size_t>(i0); i < hi; ++i) out[i] += c[i] * xj;
            }
        }
#else
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const cxd* c = a.col(j);
            const cxd xj = x[j];
            for (std::size_t i = 0; i < rows; ++i) out[i] += c[i] * xj;
        }
#endif
    }
    return out;
}

CMatrix gram_serial(const CMatrix& a) {
    CMatrix g(a.cols(), a.cols());
    for (std::size_t j = 0; j < a.cols(); ++j) {
        for (std::size_t i = 0; i <= j; ++i) {
            const cxd* ci = a.col(i);
            const cxd* cj = a.col(j);
            cxd acc = 0.0;
            for (std::size_t k = 0; k < a.rows(); ++k) acc += std::conj(ci[k]) * cj[k];
            g(i, j) = acc;
            g(j, i) = std::conj(acc);
        }
    }
    return g;
}

CMatrix gram(const CMatrix& a) {
    CMatrix g(a.cols(), a.cols());
    const std::ptrdiff_t cols = static_cast<std::ptrdiff_t>(a.cols());
#pragma omp parallel for schedule(dynamic, 8) if (a.size() > kParallelCutoff)
    for (std::ptrdiff_t j = 0; j < cols; ++j) {
        for (std::size_t i = 0; i <= static_cast<std::size_t>(j); ++i) {
            const cxd* ci = a.col(i);
            const cxd* cj = a.col(j);
            cxd acc = 0.0;
            for (std::size_t k = 0; k < a.rows(); ++k) acc += std::conj(ci[k]) * cj[k];
            g(i, static_cast<std::size_t>(j)) = acc;
            g(static_cast<std::size_t>(j), i) = std::conj(acc);
        }
    }
    return g;
}

CMatrix outer_gram_serial(const CMatrix& a) {
    CMatrix g(a.rows(), a.rows());
    for (std::size_t j = 0; j < a.rows(); ++j) {
        for (std::size_t i = 0; i <= j; ++i) {
            cxd acc = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * std::conj(a(j, k));
            g(i, j) = acc;
            g(j, i) = std::conj(acc);
        }
    }
    return g;
}

CMatrix outer_gram(const CMatrix& a) {
    CMatrix g(a.rows(), a.rows());
    const std::ptrdiff_t rows = static_cast<std::ptrdiff_t>(a.rows());
#pragma omp parallel for schedule(dynamic, 8) if (a.size() > kParallelCutoff)
    for (std::ptrdiff_t j = 0; j < rows; ++j) {
        for (std::size_t i = 0; i <= static_cast<std::size_t>(j); ++i) {
            cxd acc = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * std::conj(a(static_cast<std::size_t>(j), k));
            g(i, static_cast<std::size_t>(j)) = acc;
            g(static_cast<std::size_t>(j), i) = std::conj(acc);
        }
    }
    return g;
}

CMatrix kronecker(const CMatrix& a, const CMatrix& b, std::size_t max_entries) {
    const std::size_t rows = a.rows() * b.rows();
    const std::size_t cols = a.cols() * b.cols();
    if (rows != 0 && cols > max_entries / rows)
        throw std::invalid_argument("kronecker: result exceeds entry ceiling");
    CMatrix k(rows, cols);
    for (std::size_t ja = 0; ja < a.cols(); ++ja) {
        for (std::size_t jb = 0; jb < b.cols(); ++jb) {
            cxd* dst = k.col(ja * b.cols() + jb);
            for (std::size_t ia = 0; ia < a.rows(); ++ia) {
                const cxd va = a(ia, ja);
                const cxd* src = b.col(jb);
                cxd* block = dst + ia * b.rows();
                for (std::size_t ib = 0; ib < b.rows(); ++ib) block[ib] = va * src[ib];
            }
        }
    }
    return k;
}

CholeskyFactor::CholeskyFactor(const CMatrix& g) {
    if (g.rows() != g.cols()) throw std::invalid_argument("cholesky: matrix not square");
    const std::size_t n = g.rows();
    l_ = g;
    for (std::size_t j = 0; j < n; ++j) {
        double d = l_(j, j).real();
        for (std::size_t k = 0; k < j; ++k) d -= std::norm(l_(j, k));
        if (!(d > 0.0) || !std::isfinite(d))
            throw std::runtime_error("cholesky: matrix not positive definite");
        const double ljj = std::sqrt(d);
        l_(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            cxd acc = l_(i, j);
            for (std::size_t k = 0; k < j; ++k) acc -= l_(i, k) * std::conj(l_(j, k));
            l_(i, j) = acc / ljj;
        }
        for (std::size_t i = 0; i < j; ++i) l_(i, j) = 0.0;
    }
}

CVector CholeskyFactor::solve(const CVector& b) const {
    const std::size_t n = l_.rows();
    if (b.size() != n) throw std::invalid_argument("cholesky solve: dimension mismatch");
    CVector x = b;
    for (std::size_t i = 0; i < n; ++i) {  // L w = b
        cxd acc = x[i];
        for (std::size_t k = 0; k < i; ++k) acc -= l_(i, k) * x[k];
        x[i] = acc / l_(i, i).real();
    }
    for (std::size_t ii = n; ii-- > 0;) {  // L^H x = w
        cxd acc = x[ii];
        for (std::size_t k = ii + 1; k < n; ++k) acc -= std::conj(l_(k, ii)) * x[k];
        x[ii] = acc / l_(ii, ii).real();
    }
    return x;
}

CVector hpd_solve(const CMatrix& g, const CVector& b) {
    return CholeskyFactor(g).solve(b);
}

namespace {
std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}
}  // namespace

Rng::Rng(std::uint64_t seed) : seed_(seed), eng_(seed) {}

std::uint64_t Rng::next_u64() { return eng_(); }

double Rng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
}

cxd Rng::complex_gaussian(double variance) {
    const double s = std::sqrt(variance / 2.0);
    const double re = gaussian();
    const double im = gaussian();
    return cxd(s * re, s * im);
}

Rng Rng::child(std::uint64_t index) const {
    std::uint64_t x = seed_ ^ 0xA02B'DBF7'BB3C'0A7Aull;
    std::uint64_t h = splitmix64(x);
    x = h + index;
    h = splitmix64(x);
    return Rng(h);
}

}  // namespace bandsparse
