#include "pseudosym/oracle.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pseudosym {

Matrix IntMatrix::to_real() const
{
    Matrix m(n_, n_);
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j < n_; ++j) {
            m(i, j) = static_cast<double>((*this)(i, j));
        }
    }
    return m;
}

bool IntMatrix::symmetric() const noexcept
{
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = i + 1; j < n_; ++j) {
            if ((*this)(i, j) != (*this)(j, i)) return false;
        }
    }
    return true;
}

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b)
{
    if (a.n_ != b.n_) {
        throw DimensionError("IntMatrix product: size mismatch");
    }
    const std::size_t n = a.n_;
    IntMatrix c(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            std::int64_t acc = 0;
            for (std::size_t k = 0; k < n; ++k) {
                std::int64_t term = 0;
                if (__builtin_mul_overflow(a(i, k), b(k, j), &term) ||
                    __builtin_add_overflow(acc, term, &acc)) {
                    throw std::overflow_error("IntMatrix product overflows 64 bits");
                }
            }
            c(i, j) = acc;
        }
    }
    return c;
}

IntMatrix xi_matrix(std::size_t n)
{
    IntMatrix xi(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            xi(i, j) = i < j ? -2 : (i > j ? 1 : 0);
        }
    }
    return xi;
}

ToeplitzCheck check_toeplitz(const IntMatrix& power)
{
    const std::size_t n = power.size();
    ToeplitzCheck c;
    c.toeplitz = true;
    for (std::size_t i = 1; i < n && c.toeplitz; ++i) {
        for (std::size_t j = 1; j < n; ++j) {
            if (power(i, j) != power(i - 1, j - 1)) {
                c.toeplitz = false;
                break;
            }
        }
    }
    // xi(l) = entry (l, 0) for l >= 0, xi(l - N) = entry (0, N - l) for l >= 1.
    c.relation = c.toeplitz;
    for (std::size_t l = 1; l < n && c.relation; ++l) {
        if (-2 * power(l, 0) != power(0, n - l)) c.relation = false;
    }
    c.non_symmetric = !power.symmetric();
    return c;
}

XiPower xi_power(std::size_t n, unsigned m)
{
    if (n < 2 || m < 1) {
        throw std::invalid_argument("xi_power: need N >= 2 and M >= 1");
    }
    const IntMatrix xi = xi_matrix(n);
    IntMatrix acc = xi;
    for (unsigned k = 1; k < m; ++k) acc = acc * xi;

    const ToeplitzCheck check = check_toeplitz(acc);
    if (!check.toeplitz || !check.relation) {
        throw std::logic_error("xi_power: Xi^" + std::to_string(m) + " for N = " + std::to_string(n) +
                               " violates the Toeplitz structure");
    }
    XiPower out;
    out.n = n;
    out.m = m;
    out.matrix = acc;
    const long ln = static_cast<long>(n);
    for (long l = -(ln - 1); l <= ln - 1; ++l) {
        const std::size_t i = l >= 0 ? static_cast<std::size_t>(l) : 0;
        const std::size_t j = l >= 0 ? 0 : static_cast<std::size_t>(-l);
        out.diagonal_values[l] = acc(i, j);
    }
    return out;
}

OptimalDefectBlocks optimal_defect_blocks(std::size_t n, unsigned m, double h)
{
    if (!(h > 0.0)) {
        throw std::invalid_argument("optimal_defect_blocks: h must be positive");
    }
    const IntMatrix pm = xi_power(n, m).matrix;
    const IntMatrix pm1 = pm * xi_matrix(n);
    const double sign = m % 2 == 0 ? 1.0 : -1.0;
    const double hpow = std::pow(h, static_cast<double>(m + 1));

    OptimalDefectBlocks out{Matrix(n, n), Matrix::identity(n), std::vector<bool>(n * n),
                            std::vector<bool>(n * n)};
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            // 2 [X]_skew = X - X^T, exact in integers.
            const std::int64_t skew2 = pm(i, j) - pm(j, i);
            out.diag_block(i, j) = sign * hpow * static_cast<double>(skew2);
            out.diag_zero[i * n + j] = skew2 == 0;
            out.antidiag_block(i, j) += sign * hpow * static_cast<double>(pm1(i, j));
            out.antidiag_zero[i * n + j] = (i != j) && pm1(i, j) == 0;
        }
    }
    return out;
}

OracleComparison compare_entries(const Matrix& measured, const Matrix& exact,
                                 const std::vector<bool>& exact_zero)
{
    if (measured.rows() != exact.rows() || measured.cols() != exact.cols() ||
        exact_zero.size() != exact.rows() * exact.cols()) {
        throw DimensionError("compare_entries: shape mismatch");
    }
    OracleComparison c;
    for (std::size_t i = 0; i < exact.rows(); ++i) {
        for (std::size_t j = 0; j < exact.cols(); ++j) {
            const double diff = std::abs(measured(i, j) - exact(i, j));
            if (exact_zero[i * exact.cols() + j]) {
                c.max_abs_zero = std::max(c.max_abs_zero, diff);
            } else {
                c.max_rel_error = std::max(c.max_rel_error, diff / std::abs(exact(i, j)));
            }
        }
    }
    return c;
}

} // namespace pseudosym
