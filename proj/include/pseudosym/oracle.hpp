#pragma once

// Closed-form references for the quadratic model, whose mixed Hessian is the
// Toeplitz matrix Xi (0 diagonal, -2 above, +1 below). Powers of Xi are
// computed in exact 64-bit integer arithmetic.

#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

#include "pseudosym/linalg.hpp"

namespace pseudosym {

class IntMatrix {
public:
    IntMatrix(std::size_t n, std::int64_t fill = 0) : n_(n), data_(n * n, fill) {}

    std::size_t size() const noexcept { return n_; }
    std::int64_t& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    std::int64_t operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

    Matrix to_real() const;
    bool symmetric() const noexcept;

    /// Throws std::overflow_error if any entry overflows.
    friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b);
    friend bool operator==(const IntMatrix&, const IntMatrix&) = default;

private:
    std::size_t n_;
    std::vector<std::int64_t> data_;
};

IntMatrix xi_matrix(std::size_t n);

struct XiPower {
    std::size_t n = 0;
    unsigned m = 0;
    IntMatrix matrix{0};
    /// xi^{(M)}(l) for l in [-(N-1), N-1]: entry (i, j) = xi(i - j).
    std::map<long, std::int64_t> diagonal_values;

    std::int64_t xi(long l) const { return diagonal_values.at(l); }
};

/// Result of checking the structural claims about Xi^M.
struct ToeplitzCheck {
    bool toeplitz = false;
    bool relation = false;       // -2 xi(l) == xi(l - N) for l = 1..N-1
    bool non_symmetric = false;

    bool all() const noexcept { return toeplitz && relation && non_symmetric; }
};

ToeplitzCheck check_toeplitz(const IntMatrix& power);

/// Xi^M for N >= 2, M >= 1. Throws std::logic_error if the Toeplitz
/// structure or the wrap-around relation fails. Symmetry is not enforced:
/// Xi^M is a multiple of I for N = 2 and even M.
XiPower xi_power(std::size_t n, unsigned m);

struct OptimalDefectBlocks {
    Matrix diag_block;      // [q~_q, p~_q] = 2 (-1)^M h^{M+1} [Xi^M]_skew
    Matrix antidiag_block;  // A = I + (-1)^M h^{M+1} Xi^{M+1}
    /// True where the exact value is zero (integer-exact knowledge).
    std::vector<bool> diag_zero;
    std::vector<bool> antidiag_zero;
};

/// Closed-form defect blocks of p-implicit FPI Symplectic Euler on the
/// quadratic model.
OptimalDefectBlocks optimal_defect_blocks(std::size_t n, unsigned m, double h);

struct OracleComparison {
    double max_rel_error = 0.0;   // over entries with nonzero exact value
    double max_abs_zero = 0.0;    // over entries with zero exact value
    bool within(double rel_tol, double abs_tol) const noexcept
    {
        return max_rel_error <= rel_tol && max_abs_zero <= abs_tol;
    }
};

OracleComparison compare_entries(const Matrix& measured, const Matrix& exact,
                                 const std::vector<bool>& exact_zero);

} // namespace pseudosym
