#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace bandsparse {

using cxd = std::complex<double>;
using CVector = std::vector<cxd>;

// Dense complex matrix, column-major, immutable in spirit once filled.
class CMatrix {
public:
    CMatrix() = default;
    CMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    cxd& operator()(std::size_t i, std::size_t j) { return data_[j * rows_ + i]; }
    const cxd& operator()(std::size_t i, std::size_t j) const { return data_[j * rows_ + i]; }

    cxd* col(std::size_t j) { return data_.data() + j * rows_; }
    const cxd* col(std::size_t j) const { return data_.data() + j * rows_; }

    std::vector<cxd>& data() { return data_; }
    const std::vector<cxd>& data() const { return data_; }

    static CMatrix identity(std::size_t n);
    static CMatrix from_columns(const CMatrix& a, const std::vector<std::size_t>& cols);

    bool all_finite() const;

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<cxd> data_;
};

// Kernels come in an OpenMP-parallel default and a serial reference kept for
// testing. Both accumulate in the same order per output entry, so results are
// bit-identical regardless of thread count.

CVector hermitian_product(const CMatrix& a, const CVector& y);        // A^H y
CVector hermitian_product_serial(const CMatrix& a, const CVector& y);

CVector matvec(const CMatrix& a, const CVector& x);                   // A x
CVector matvec_serial(const CMatrix& a, const CVector& x);

CMatrix gram(const CMatrix& a);          // A^H A
CMatrix gram_serial(const CMatrix& a);

CMatrix outer_gram(const CMatrix& a);    // A A^H
CMatrix outer_gram_serial(const CMatrix& a);

inline constexpr std::size_t kDefaultKroneckerCeiling = 1u << 27;

CMatrix kronecker(const CMatrix& a, const CMatrix& b,
                  std::size_t max_entries = kDefaultKroneckerCeiling);

// Cholesky factor of a Hermitian positive definite matrix. Throws
// std::runtime_error when a pivot fails, instead of propagating NaN.
class CholeskyFactor {
public:
    explicit CholeskyFactor(const CMatrix& g);
    CVector solve(const CVector& b) const;
    std::size_t dim() const { return l_.rows(); }

private:
    CMatrix l_;  // lower triangle
};

CVector hpd_solve(const CMatrix& g, const CVector& b);

// Deterministic seeded stream: mt19937_64 engine with hand-rolled uniform and
// Box-Muller draws, since the <random> distributions are not pinned by the
// standard. child(i) derives an independent per-trial stream from a counter.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t next_u64();
    double uniform();                 // [0, 1)
    double gaussian();                // standard normal
    cxd complex_gaussian(double variance);  // circular, E|z|^2 = variance
    Rng child(std::uint64_t index) const;

private:
    std::uint64_t seed_;
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

double norm2(const CVector& v);
bool all_finite(const CVector& v);

}  // namespace bandsparse
