#include "pseudosym/linalg.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

namespace pseudosym {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op)
{
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError(std::string(op) + ": shape mismatch " + std::to_string(a.rows()) +
                             "x" + std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) +
                             "x" + std::to_string(b.cols()));
    }
}

void require_square(const Matrix& a, const char* op)
{
    if (!a.square()) {
        throw DimensionError(std::string(op) + ": matrix is not square (" +
                             std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + ")");
    }
}

std::string singular_message(std::size_t pivot, double magnitude)
{
    char buf[160];
    std::snprintf(buf, sizeof buf, "matrix is singular to tolerance at pivot %zu (|pivot| = %.3e)",
                  pivot, magnitude);
    return buf;
}

} // namespace

SingularMatrixError::SingularMatrixError(std::size_t pivot, double magnitude)
    : std::runtime_error(singular_message(pivot, magnitude)), pivot_(pivot), magnitude_(magnitude)
{
}

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill)
{
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0)
{
    data_.reserve(rows_ * cols_);
    for (const auto& row : rows) {
        if (row.size() != cols_) {
            throw DimensionError("Matrix: ragged initializer list");
        }
        data_.insert(data_.end(), row.begin(), row.end());
    }
}

Matrix Matrix::identity(std::size_t n)
{
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

Matrix Matrix::block(std::size_t row0, std::size_t col0, std::size_t rows, std::size_t cols) const
{
    if (row0 + rows > rows_ || col0 + cols > cols_) {
        throw DimensionError("Matrix::block: out of range");
    }
    Matrix out(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            out(i, j) = (*this)(row0 + i, col0 + j);
        }
    }
    return out;
}

void Matrix::set_block(std::size_t row0, std::size_t col0, const Matrix& src)
{
    if (row0 + src.rows() > rows_ || col0 + src.cols() > cols_) {
        throw DimensionError("Matrix::set_block: out of range");
    }
    for (std::size_t i = 0; i < src.rows(); ++i) {
        for (std::size_t j = 0; j < src.cols(); ++j) {
            (*this)(row0 + i, col0 + j) = src(i, j);
        }
    }
}

bool Matrix::all_finite() const noexcept
{
    return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

Matrix& Matrix::operator+=(const Matrix& rhs)
{
    require_same_shape(*this, rhs, "add");
    for (std::size_t k = 0; k < data_.size(); ++k) {
        data_[k] += rhs.data_[k];
    }
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& rhs)
{
    require_same_shape(*this, rhs, "subtract");
    for (std::size_t k = 0; k < data_.size(); ++k) {
        data_[k] -= rhs.data_[k];
    }
    return *this;
}

Matrix& Matrix::operator*=(double s) noexcept
{
    for (auto& x : data_) {
        x *= s;
    }
    return *this;
}

Matrix operator+(Matrix lhs, const Matrix& rhs) { return lhs += rhs; }
Matrix operator-(Matrix lhs, const Matrix& rhs) { return lhs -= rhs; }
Matrix operator-(Matrix m) { return m *= -1.0; }
Matrix operator*(Matrix m, double s) { return m *= s; }
Matrix operator*(double s, Matrix m) { return m *= s; }

Matrix operator*(const Matrix& a, const Matrix& b)
{
    if (a.cols() != b.rows()) {
        throw DimensionError("mat_mul: inner dimensions differ (" + std::to_string(a.cols()) +
                             " vs " + std::to_string(b.rows()) + ")");
    }
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            for (std::size_t j = 0; j < b.cols(); ++j) {
                c(i, j) += aik * b(k, j);
            }
        }
    }
    return c;
}

std::vector<double> operator*(const Matrix& a, std::span<const double> x)
{
    if (a.cols() != x.size()) {
        throw DimensionError("matrix-vector product: size mismatch");
    }
    std::vector<double> y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) {
            acc += a(i, j) * x[j];
        }
        y[i] = acc;
    }
    return y;
}

Matrix mat_mul(const Matrix& a, const Matrix& b) { return a * b; }
Matrix add(const Matrix& a, const Matrix& b) { return a + b; }
Matrix scale(const Matrix& a, double s) { return a * s; }

Matrix transpose(const Matrix& a)
{
    Matrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            t(j, i) = a(i, j);
        }
    }
    return t;
}

Matrix bracket(const Matrix& r, const Matrix& s)
{
    require_square(r, "bracket");
    require_same_shape(r, s, "bracket");
    const Matrix rts = transpose(r) * s;
    return rts - transpose(rts);
}

Matrix skew_part(const Matrix& a)
{
    require_square(a, "skew_part");
    Matrix out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            out(i, j) = 0.5 * (a(i, j) - a(j, i));
        }
    }
    return out;
}

Matrix symplectic_J(std::size_t n)
{
    if (n == 0) {
        throw DimensionError("symplectic_J: N must be at least 1");
    }
    Matrix j(2 * n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        j(i, n + i) = 1.0;
        j(n + i, i) = -1.0;
    }
    return j;
}

double frobenius_norm(const Matrix& a)
{
    double acc = 0.0;
    for (double x : a.data()) {
        acc += x * x;
    }
    return std::sqrt(acc);
}

double max_abs(const Matrix& a)
{
    double m = 0.0;
    for (double x : a.data()) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

Matrix mat_pow(const Matrix& a, unsigned k)
{
    require_square(a, "mat_pow");
    if (k > 64) {
        throw std::invalid_argument("mat_pow: exponent above 64");
    }
    Matrix out = Matrix::identity(a.rows());
    for (unsigned i = 0; i < k; ++i) {
        out = out * a;
    }
    return out;
}

LuDecomposition::LuDecomposition(const Matrix& a) : lu_(a), perm_(a.rows())
{
    require_square(a, "LU");
    const std::size_t n = a.rows();
    std::iota(perm_.begin(), perm_.end(), std::size_t{0});
    const double tol = kPivotTolerance * frobenius_norm(a);

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = std::abs(lu_(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(lu_(i, k)) > best) {
                best = std::abs(lu_(i, k));
                piv = i;
            }
        }
        if (!(best > tol)) {
            throw SingularMatrixError(k, best);
        }
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(lu_(k, j), lu_(piv, j));
            }
            std::swap(perm_[k], perm_[piv]);
            sign_ = -sign_;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            lu_(i, k) /= lu_(k, k);
            const double lik = lu_(i, k);
            for (std::size_t j = k + 1; j < n; ++j) {
                lu_(i, j) -= lik * lu_(k, j);
            }
        }
    }
}

std::vector<double> LuDecomposition::solve(std::span<const double> b) const
{
    const std::size_t n = lu_.rows();
    if (b.size() != n) {
        throw DimensionError("LU solve: right-hand side has wrong length");
    }
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = b[perm_[i]];
        for (std::size_t j = 0; j < i; ++j) {
            acc -= lu_(i, j) * x[j];
        }
        x[i] = acc;
    }
    for (std::size_t i = n; i-- > 0;) {
        double acc = x[i];
        for (std::size_t j = i + 1; j < n; ++j) {
            acc -= lu_(i, j) * x[j];
        }
        x[i] = acc / lu_(i, i);
    }
    return x;
}

double LuDecomposition::determinant() const noexcept
{
    double det = sign_;
    for (std::size_t i = 0; i < lu_.rows(); ++i) {
        det *= lu_(i, i);
    }
    return det;
}

std::vector<double> lu_solve(const Matrix& a, std::span<const double> b)
{
    return LuDecomposition(a).solve(b);
}

double determinant(const Matrix& a)
{
    require_square(a, "determinant");
    if (a.rows() == 0) {
        return 1.0;
    }
    try {
        return LuDecomposition(a).determinant();
    } catch (const SingularMatrixError&) {
        return 0.0;
    }
}

} // namespace pseudosym
