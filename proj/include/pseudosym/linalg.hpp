#pragma once

// Small dense linear algebra: row-major real matrices sized for phase spaces
// of a few dozen dimensions, plus the bracket [R,S] = R^T S - S^T R.

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pseudosym {

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class SingularMatrixError : public std::runtime_error {
public:
    SingularMatrixError(std::size_t pivot, double magnitude);
    std::size_t pivot_index() const noexcept { return pivot_; }
    double pivot_magnitude() const noexcept { return magnitude_; }

private:
    std::size_t pivot_;
    double magnitude_;
};

class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);
    static Matrix zeros(std::size_t rows, std::size_t cols) { return Matrix(rows, cols); }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    /// Copies the rows x cols sub-block starting at (row0, col0).
    Matrix block(std::size_t row0, std::size_t col0, std::size_t rows, std::size_t cols) const;
    void set_block(std::size_t row0, std::size_t col0, const Matrix& src);

    bool all_finite() const noexcept;

    Matrix& operator+=(const Matrix& rhs);
    Matrix& operator-=(const Matrix& rhs);
    Matrix& operator*=(double s) noexcept;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix operator+(Matrix lhs, const Matrix& rhs);
Matrix operator-(Matrix lhs, const Matrix& rhs);
Matrix operator-(Matrix m);
Matrix operator*(Matrix m, double s);
Matrix operator*(double s, Matrix m);
Matrix operator*(const Matrix& a, const Matrix& b);
std::vector<double> operator*(const Matrix& a, std::span<const double> x);

Matrix mat_mul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
Matrix add(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& a, double s);

/// R^T S - S^T R. Skew-symmetric by construction.
Matrix bracket(const Matrix& r, const Matrix& s);

/// (A - A^T) / 2
Matrix skew_part(const Matrix& a);

/// [[O, I], [-I, O]] of size 2N.
Matrix symplectic_J(std::size_t n);

double frobenius_norm(const Matrix& a);
double max_abs(const Matrix& a);

/// A^k by repeated multiplication, k <= 64.
Matrix mat_pow(const Matrix& a, unsigned k);

/// LU factorisation with partial pivoting, P A = L U stored compactly.
class LuDecomposition {
public:
    /// Throws SingularMatrixError when a pivot falls below 1e-14 * ||A||_F.
    explicit LuDecomposition(const Matrix& a);

    std::vector<double> solve(std::span<const double> b) const;
    double determinant() const noexcept;
    std::size_t size() const noexcept { return lu_.rows(); }

private:
    Matrix lu_;
    std::vector<std::size_t> perm_;
    int sign_ = 1;
};

inline constexpr double kPivotTolerance = 1e-14;

std::vector<double> lu_solve(const Matrix& a, std::span<const double> b);

/// Determinant via LU; returns exactly 0 for singular input instead of throwing.
double determinant(const Matrix& a);

/// Dense Gaussian elimination with partial pivoting on a scalar type that may
/// carry derivative information (pivoting is decided on values only).
/// `a` is row-major n x n and is consumed.
template <class S, class ValueOf>
std::vector<S> solve_dense(std::vector<S> a, std::vector<S> b, std::size_t n, ValueOf value_of)
{
    if (a.size() != n * n || b.size() != n) {
        throw DimensionError("solve_dense: expected " + std::to_string(n) + "x" +
                             std::to_string(n) + " system");
    }
    double norm2 = 0.0;
    for (const auto& x : a) {
        const double v = value_of(x);
        norm2 += v * v;
    }
    const double tol = kPivotTolerance * std::sqrt(norm2);

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = std::abs(value_of(a[k * n + k]));
        for (std::size_t i = k + 1; i < n; ++i) {
            const double v = std::abs(value_of(a[i * n + k]));
            if (v > best) {
                best = v;
                piv = i;
            }
        }
        if (!(best > tol)) {
            throw SingularMatrixError(k, best);
        }
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(a[k * n + j], a[piv * n + j]);
            }
            std::swap(b[k], b[piv]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const S factor = a[i * n + k] / a[k * n + k];
            for (std::size_t j = k + 1; j < n; ++j) {
                a[i * n + j] = a[i * n + j] - factor * a[k * n + j];
            }
            b[i] = b[i] - factor * b[k];
        }
    }
    std::vector<S> x(b);
    for (std::size_t ii = n; ii-- > 0;) {
        S acc = b[ii];
        for (std::size_t j = ii + 1; j < n; ++j) {
            acc = acc - a[ii * n + j] * x[j];
        }
        x[ii] = acc / a[ii * n + ii];
    }
    return x;
}

} // namespace pseudosym
