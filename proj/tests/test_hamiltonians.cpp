#include "doctest.h"

#include <cmath>
#include <numbers>

#include "pseudosym/autodiff.hpp"
#include "pseudosym/tokamak.hpp"

using namespace pseudosym;

TEST_CASE("quadratic model gradients")
{
    const QuadraticModel m(2);
    // H = 1/2 (q1^2 + q2^2 + p1^2 + p2^2) + p1 q2 - 2 q1 p2
    const Vec<double> q{1, 0};
    const Vec<double> p{0, 1};
    CHECK(m.grad_q(q, p) == Vec<double>{-1, 0});
    CHECK(m.grad_p(q, p) == Vec<double>{0, -1});
    CHECK(m.value(q, p) == doctest::Approx(1.0 - 2.0));
    CHECK_THROWS_AS(QuadraticModel(1), std::invalid_argument);
}

TEST_CASE("quadratic model mixed Hessian is Xi")
{
    const QuadraticModel m(3);
    const Matrix xi{{0, -2, -2}, {1, 0, -2}, {1, 1, 0}};
    CHECK(m.xi() == xi);
    const Vec<double> q{0.1, 0.2, 0.3};
    const Vec<double> p{-0.3, 0.5, 0.7};
    const HessianBlocks exact = m.hessian(q, p);
    const HessianBlocks ad = m.Hamiltonian::hessian(q, p);
    CHECK(exact.pq == xi);
    CHECK(ad.pq == xi);
    CHECK(ad.qq == Matrix::identity(3));
    CHECK(ad.pp == Matrix::identity(3));
}

TEST_CASE("gradients agree with finite differences of the energy")
{
    const QuadraticModel quad(4);
    CHECK(gradient_fd_mismatch(quad, PhaseState{{0.1, -0.2, 0.3, 0.4}, {0.5, 0.1, -0.7, 0.2}}) <= 1e-8);
    const TokamakModel tok;
    CHECK(gradient_fd_mismatch(tok, tok.reference_state()) <= 1e-6);
    const LinearPotentialModel lin(0.5, 1.5);
    CHECK(gradient_fd_mismatch(lin, PhaseState{{0.3, -0.2, 0.1}, {0.1, 0.2, 0.3}}) <= 1e-8);
}

TEST_CASE("Hessians are symmetric")
{
    const TokamakModel tok;
    const PhaseState z = tok.reference_state();
    const HessianBlocks hb = tok.hessian(z.q, z.p);
    CHECK(frobenius_norm(hb.qq - transpose(hb.qq)) <= 1e-12 * frobenius_norm(hb.qq));
    CHECK(frobenius_norm(hb.pp - Matrix::identity(3)) == 0.0);
}

TEST_CASE("swapped Hamiltonian")
{
    const QuadraticModel base(2);
    const SwappedHamiltonian sw(base);
    const PhaseState z{{0.3, -0.1}, {0.2, 0.6}};
    const PhaseState zs = swap_coordinates(z);
    CHECK(zs.q == Vec<double>{-0.2, -0.6});
    CHECK(zs.p == Vec<double>{0.3, -0.1});
    CHECK(unswap_coordinates(zs).q == z.q);
    CHECK(sw.value(zs) == doctest::Approx(base.value(z)));
    CHECK(gradient_fd_mismatch(sw, zs) <= 1e-8);
    const HessianBlocks hs = sw.hessian(zs.q, zs.p);
    const HessianBlocks ad = sw.Hamiltonian::hessian(zs.q, zs.p);
    CHECK(frobenius_norm(hs.pq - ad.pq) <= 1e-14);
    CHECK(frobenius_norm(hs.qq - ad.qq) <= 1e-14);
}

TEST_CASE("flux function against its closed form")
{
    // a = 1, R = 5: F(r) = (r^3/3 - r^2/2 + 2r - 2 ln(1 + r)) / R
    const FluxFunction f(5.0, 1.0);
    for (double r = 0.0; r <= 3.0; r += 0.125) {
        const double exact = (r * r * r / 3.0 - r * r / 2.0 + 2.0 * r - 2.0 * std::log1p(r)) / 5.0;
        CHECK(std::abs(f.value(r) - exact) <= 1e-11);
    }
    CHECK(f.value(0.0) == 0.0);
    CHECK_THROWS_AS(f.value(-0.1), DomainError);
    CHECK_THROWS_AS(FluxFunction(5.0, -1.0).value(2.0), DomainError);
    const std::vector<double> samples{0.05, 0.3, 1.0, 2.5};
    CHECK(primitive_derivative_mismatch(f, samples) <= 1e-8);
}

TEST_CASE("safety factor")
{
    const PhysicalParams p;
    CHECK(safety_factor(0.0, p) == 1.0);
    CHECK(safety_factor(1.0, p) == doctest::Approx(1.0));
    CHECK(safety_factor(2.0, p) == doctest::Approx(3.0 / 5.0));
}

TEST_CASE("nondimensionalisation scales and round trip")
{
    const PhysicalParams p;
    const auto s = Nondimensionalizer::from(p);
    CHECK(s.length == doctest::Approx(2 * std::numbers::pi * 5.0));
    CHECK(s.time == doctest::Approx(1.673e-27 / (1.602e-19 * 0.02)));
    CHECK(s.potential == doctest::Approx(s.length * p.b0));
    CHECK(s.energy == doctest::Approx(s.momentum * s.momentum / p.mass));
    const PhaseState si = reference_initial_state_si();
    const PhaseState back = s.dimensionalize(s.nondimensionalize(si));
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(back.q[i] == doctest::Approx(si.q[i]).epsilon(1e-15));
        CHECK(back.p[i] == doctest::Approx(si.p[i]).epsilon(1e-15));
    }
    PhysicalParams bad;
    bad.mass = 0.0;
    CHECK_THROWS_WITH_AS(Nondimensionalizer::from(bad), doctest::Contains("mass"), std::invalid_argument);
}

TEST_CASE("vector potential")
{
    const TokamakModel tok;
    const double l0 = tok.scales().length;
    // On the magnetic axis F(0) = 0 and log(rho/R) = 0.
    const Vec<double> axis{5.0 / l0, 0.0, 0.0};
    for (double a : tok.potential(axis).a) CHECK(std::abs(a) <= 1e-300);
    // Outside the axis circle the z component is negative.
    const Vec<double> out{5.5 / l0, 0.0, 0.0};
    CHECK(tok.potential(out).a[2] < 0.0);
    // Toroidal direction at phi = 0 is +y.
    CHECK(tok.potential(out).a[1] > 0.0);
    CHECK_THROWS_AS(tok.potential(Vec<double>{0.0, 0.0, 0.1}), DomainError);
}

TEST_CASE("potential Jacobian matches finite differences")
{
    const TokamakModel tok;
    const Vec<double> q = tok.reference_state().q;
    const PotentialEval<double> pe = tok.potential(q);
    for (std::size_t j = 0; j < 3; ++j) {
        const double step = 1e-6;
        Vec<double> qp = q;
        Vec<double> qm = q;
        qp[j] += step;
        qm[j] -= step;
        const Vec<double> ap = tok.potential(qp).a;
        const Vec<double> am = tok.potential(qm).a;
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(std::abs((ap[i] - am[i]) / (2 * step) - pe.jac[i * 3 + j]) <= 1e-7);
        }
    }
}

TEST_CASE("reference state")
{
    const TokamakModel tok;
    const PhaseState z = tok.reference_state();
    CHECK(z.q[0] == doctest::Approx(5.1 / (10 * std::numbers::pi)));
    CHECK(z.q[1] == 0.0);
    CHECK(tok.value(z) > 0.0);
}
