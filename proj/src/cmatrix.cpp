#include "pinchnet/cmatrix.hpp"

#include "pinchnet/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace pinchnet {

namespace {

void require_same_shape(const CMatrix& a, const CMatrix& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw InvalidArgument(std::string(what) + ": shape mismatch");
    }
}

} // namespace

CMatrix::CMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols, cplx{}) {}

CMatrix::CMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (entries_.size() != rows_ * cols_) {
        throw InvalidArgument("CMatrix: entry count does not match rows*cols");
    }
}

CMatrix::CMatrix(std::initializer_list<std::initializer_list<cplx>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    entries_.reserve(rows_ * cols_);
    for (const auto& row : rows) {
        if (row.size() != cols_) {
            throw InvalidArgument("CMatrix: ragged initializer");
        }
        entries_.insert(entries_.end(), row.begin(), row.end());
    }
}

CMatrix CMatrix::identity(std::size_t n) {
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

CMatrix CMatrix::diagonal(std::span<const cplx> diag) {
    CMatrix m(diag.size(), diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) {
        m(i, i) = diag[i];
    }
    return m;
}

CMatrix CMatrix::column(std::span<const cplx> values) {
    return CMatrix(values.size(), 1, std::vector<cplx>(values.begin(), values.end()));
}

CMatrix CMatrix::block_diagonal(std::span<const CMatrix> blocks) {
    std::size_t rows = 0;
    std::size_t cols = 0;
    for (const auto& b : blocks) {
        rows += b.rows();
        cols += b.cols();
    }
    CMatrix m(rows, cols);
    std::size_t r0 = 0;
    std::size_t c0 = 0;
    for (const auto& b : blocks) {
        for (std::size_t r = 0; r < b.rows(); ++r) {
            for (std::size_t c = 0; c < b.cols(); ++c) {
                m(r0 + r, c0 + c) = b(r, c);
            }
        }
        r0 += b.rows();
        c0 += b.cols();
    }
    return m;
}

CMatrix CMatrix::transpose() const {
    CMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < cols_; ++c) {
            t(c, r) = (*this)(r, c);
        }
    }
    return t;
}

CMatrix CMatrix::adjoint() const {
    CMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < cols_; ++c) {
            t(c, r) = std::conj((*this)(r, c));
        }
    }
    return t;
}

CMatrix CMatrix::select(std::span<const std::size_t> row_idx,
                        std::span<const std::size_t> col_idx) const {
    CMatrix m(row_idx.size(), col_idx.size());
    for (std::size_t r = 0; r < row_idx.size(); ++r) {
        for (std::size_t c = 0; c < col_idx.size(); ++c) {
            m(r, c) = (*this)(row_idx[r], col_idx[c]);
        }
    }
    return m;
}

double CMatrix::frobenius_norm() const {
    double sum = 0.0;
    for (const auto& z : entries_) {
        sum += std::norm(z);
    }
    return std::sqrt(sum);
}

double CMatrix::max_abs() const {
    double best = 0.0;
    for (const auto& z : entries_) {
        best = std::max(best, std::abs(z));
    }
    return best;
}

bool CMatrix::all_finite() const {
    return std::all_of(entries_.begin(), entries_.end(), [](const cplx& z) {
        return std::isfinite(z.real()) && std::isfinite(z.imag());
    });
}

CMatrix& CMatrix::operator+=(const CMatrix& rhs) {
    require_same_shape(*this, rhs, "CMatrix::operator+=");
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        entries_[i] += rhs.entries_[i];
    }
    return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& rhs) {
    require_same_shape(*this, rhs, "CMatrix::operator-=");
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        entries_[i] -= rhs.entries_[i];
    }
    return *this;
}

CMatrix& CMatrix::operator*=(cplx s) {
    for (auto& z : entries_) {
        z *= s;
    }
    return *this;
}

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
    if (a.cols() != b.rows()) {
        throw InvalidArgument("CMatrix product: inner dimensions differ");
    }
    CMatrix m(a.rows(), b.cols());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const cplx lhs = a(r, k);
            if (lhs == cplx{}) {
                continue;
            }
            for (std::size_t c = 0; c < b.cols(); ++c) {
                m(r, c) += lhs * b(k, c);
            }
        }
    }
    return m;
}

CVector operator*(const CMatrix& a, std::span<const cplx> x) {
    if (a.cols() != x.size()) {
        throw InvalidArgument("CMatrix-vector product: dimension mismatch");
    }
    CVector y(a.rows());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        cplx acc{};
        for (std::size_t c = 0; c < a.cols(); ++c) {
            acc += a(r, c) * x[c];
        }
        y[r] = acc;
    }
    return y;
}

CMatrix solve_linear(const CMatrix& a, const CMatrix& b) {
    if (!a.square()) {
        throw InvalidArgument("solve_linear: coefficient matrix is not square");
    }
    if (b.rows() != a.rows()) {
        throw InvalidArgument("solve_linear: right-hand side row count differs");
    }
    const std::size_t n = a.rows();
    const std::size_t m = b.cols();
    if (n == 0) {
        return b;
    }

    const double threshold = 1e-14 * a.max_abs();
    CMatrix lu = a;
    CMatrix x = b;

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pivot = k;
        double best = std::abs(lu(k, k));
        for (std::size_t r = k + 1; r < n; ++r) {
            const double mag = std::abs(lu(r, k));
            if (mag > best) {
                best = mag;
                pivot = r;
            }
        }
        if (!(best > threshold) || best == 0.0) {
            throw SingularMatrix("solve_linear: pivot " + std::to_string(best) + " at column " +
                                 std::to_string(k) + " below threshold");
        }
        if (pivot != k) {
            for (std::size_t c = 0; c < n; ++c) {
                std::swap(lu(k, c), lu(pivot, c));
            }
            for (std::size_t c = 0; c < m; ++c) {
                std::swap(x(k, c), x(pivot, c));
            }
        }
        const cplx inv = 1.0 / lu(k, k);
        for (std::size_t r = k + 1; r < n; ++r) {
            const cplx factor = lu(r, k) * inv;
            if (factor == cplx{}) {
                continue;
            }
            lu(r, k) = 0.0;
            for (std::size_t c = k + 1; c < n; ++c) {
                lu(r, c) -= factor * lu(k, c);
            }
            for (std::size_t c = 0; c < m; ++c) {
                x(r, c) -= factor * x(k, c);
            }
        }
    }

    for (std::size_t k = n; k-- > 0;) {
        const cplx inv = 1.0 / lu(k, k);
        for (std::size_t c = 0; c < m; ++c) {
            cplx acc = x(k, c);
            for (std::size_t j = k + 1; j < n; ++j) {
                acc -= lu(k, j) * x(j, c);
            }
            x(k, c) = acc * inv;
        }
    }
    return x;
}

CVector solve_linear(const CMatrix& a, std::span<const cplx> b) {
    const CMatrix x = solve_linear(a, CMatrix::column(b));
    return CVector(x.entries().begin(), x.entries().end());
}

} // namespace pinchnet
