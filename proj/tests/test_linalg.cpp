#include "doctest.h"

#include <cmath>

#include "pseudosym/linalg.hpp"

using namespace pseudosym;

TEST_CASE("bracket of a shear with the identity")
{
    const Matrix r{{1, 1}, {0, 1}};
    const Matrix s = Matrix::identity(2);
    // R^T - R
    CHECK(bracket(r, s) == Matrix{{0, -1}, {1, 0}});
    CHECK(bracket(s, r) == Matrix{{0, 1}, {-1, 0}});
}

TEST_CASE("bracket is skew-symmetric")
{
    const Matrix r{{1.5, -2, 0.25}, {3, 0.5, 1}, {-1, 2, 4}};
    const Matrix s{{0.3, 1, -2}, {0.7, -0.1, 5}, {2, 2, 1}};
    const Matrix b = bracket(r, s);
    CHECK(frobenius_norm(b + transpose(b)) == 0.0);
}

TEST_CASE("skew part")
{
    CHECK(skew_part(Matrix{{1, 2}, {0, 1}}) == Matrix{{0, 1}, {-1, 0}});
}

TEST_CASE("norms")
{
    CHECK(frobenius_norm(Matrix{{3, 0}, {0, 4}}) == doctest::Approx(5.0));
    CHECK(max_abs(Matrix{{3, -7}, {0, 4}}) == 7.0);
}

TEST_CASE("symplectic J")
{
    for (std::size_t n : {1u, 2u, 3u, 5u}) {
        const Matrix j = symplectic_J(n);
        CHECK(std::abs(determinant(j) - 1.0) <= 1e-15);
        CHECK(j * j == -Matrix::identity(2 * n));
        CHECK(transpose(j) == -j);
    }
    CHECK_THROWS_AS(symplectic_J(0), DimensionError);
}

TEST_CASE("blocks round-trip")
{
    Matrix m(4, 4);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) m(i, j) = static_cast<double>(4 * i + j);
    const Matrix tr = m.block(0, 2, 2, 2);
    CHECK(tr == Matrix{{2, 3}, {6, 7}});
    Matrix z(4, 4);
    z.set_block(0, 2, tr);
    CHECK(z(1, 3) == 7.0);
    CHECK_THROWS_AS(m.block(3, 3, 2, 2), DimensionError);
}

TEST_CASE("dimension mismatches are rejected")
{
    CHECK_THROWS_AS(Matrix(2, 3) * Matrix(2, 3), DimensionError);
    CHECK_THROWS_AS(Matrix(2, 2) + Matrix(3, 3), DimensionError);
    CHECK_THROWS_AS(determinant(Matrix(2, 3)), DimensionError);
}

TEST_CASE("LU solve residual on a 6x6 system")
{
    Matrix a(6, 6);
    for (std::size_t i = 0; i < 6; ++i) {
        for (std::size_t j = 0; j < 6; ++j) {
            a(i, j) = std::sin(1.0 + 3.0 * static_cast<double>(i) + 7.0 * static_cast<double>(j));
        }
        a(i, i) += 2.0;
    }
    const std::vector<double> b{1, -2, 3, 0.5, -1, 2};
    const std::vector<double> x = lu_solve(a, b);
    const std::vector<double> ax = a * std::span<const double>(x);
    for (std::size_t i = 0; i < 6; ++i) CHECK(std::abs(ax[i] - b[i]) <= 1e-13);
}

TEST_CASE("determinant")
{
    CHECK(determinant(Matrix{{2, 1}, {1, 3}}) == doctest::Approx(5.0).epsilon(1e-15));
    // Needs a row swap: det flips sign relative to the unpivoted order.
    CHECK(determinant(Matrix{{0, 1}, {1, 0}}) == -1.0);
    const Matrix a{{1, 2, 0}, {0, 1, 4}, {5, 6, 0}};
    const Matrix b{{2, 0, 1}, {1, 3, 0}, {0, 1, 1}};
    CHECK(determinant(a * b) == doctest::Approx(determinant(a) * determinant(b)).epsilon(1e-13));
    CHECK(determinant(Matrix{{1, 2}, {2, 4}}) == 0.0);
    CHECK_THROWS_AS(LuDecomposition(Matrix{{1, 2}, {2, 4}}), SingularMatrixError);
}

TEST_CASE("matrix power")
{
    const Matrix r{{0, -1}, {1, 0}};
    CHECK(mat_pow(r, 4) == Matrix::identity(2));
    CHECK(mat_pow(r, 0) == Matrix::identity(2));
}

TEST_CASE("solve_dense matches the LU solver")
{
    const Matrix a{{4, 1, 2}, {1, 5, 3}, {2, 3, 6}};
    const std::vector<double> b{1, 2, 3};
    const auto x1 = lu_solve(a, b);
    std::vector<double> flat(a.data().begin(), a.data().end());
    const auto x2 = solve_dense(flat, b, 3, [](double v) { return v; });
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(x1[i] - x2[i]) <= 1e-15);
    CHECK_THROWS_AS(solve_dense(std::vector<double>{1, 2, 2, 4}, std::vector<double>{1, 1}, 2,
                                [](double v) { return v; }),
                    SingularMatrixError);
}
