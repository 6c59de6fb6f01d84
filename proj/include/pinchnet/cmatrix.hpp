#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace pinchnet {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

inline constexpr cplx kJ{0.0, 1.0};

/// Dense row-major complex matrix. Carries every scattering block and the
/// intermediate products of the cascade algebra.
class CMatrix {
public:
    CMatrix() = default;
    CMatrix(std::size_t rows, std::size_t cols);
    CMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries);
    CMatrix(std::initializer_list<std::initializer_list<cplx>> rows);

    static CMatrix identity(std::size_t n);
    static CMatrix diagonal(std::span<const cplx> diag);
    static CMatrix column(std::span<const cplx> values);
    /// Block-diagonal stack of the given (not necessarily square) blocks.
    static CMatrix block_diagonal(std::span<const CMatrix> blocks);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }
    bool empty() const noexcept { return entries_.empty(); }

    cplx& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
    const cplx& operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

    std::span<const cplx> entries() const noexcept { return entries_; }

    CMatrix transpose() const;
    CMatrix adjoint() const;
    /// Submatrix picking the listed rows and columns, in order.
    CMatrix select(std::span<const std::size_t> row_idx, std::span<const std::size_t> col_idx) const;

    double frobenius_norm() const;
    double max_abs() const;
    bool all_finite() const;

    CMatrix& operator+=(const CMatrix& rhs);
    CMatrix& operator-=(const CMatrix& rhs);
    CMatrix& operator*=(cplx s);

    friend CMatrix operator+(CMatrix lhs, const CMatrix& rhs) { return lhs += rhs; }
    friend CMatrix operator-(CMatrix lhs, const CMatrix& rhs) { return lhs -= rhs; }
    friend CMatrix operator*(CMatrix m, cplx s) { return m *= s; }
    friend CMatrix operator*(cplx s, CMatrix m) { return m *= s; }
    friend CMatrix operator*(const CMatrix& a, const CMatrix& b);
    friend bool operator==(const CMatrix&, const CMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> entries_;
};

CVector operator*(const CMatrix& a, std::span<const cplx> x);

/// Solves A X = B by Gaussian elimination with partial pivoting.
/// Throws SingularMatrix when a pivot falls below 1e-14 times the largest
/// entry magnitude of A.
CMatrix solve_linear(const CMatrix& a, const CMatrix& b);
CVector solve_linear(const CMatrix& a, std::span<const cplx> b);

} // namespace pinchnet
