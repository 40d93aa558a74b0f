#include "pseudosym/hamiltonian.hpp"

#include <algorithm>
#include <cmath>

namespace pseudosym {

void Hamiltonian::check_dims(std::size_t nq, std::size_t np) const
{
    if (nq != dim() || np != dim()) {
        throw DimensionError(name() + ": expected q and p of dimension " + std::to_string(dim()) +
                             ", got " + std::to_string(nq) + " and " + std::to_string(np));
    }
}

HessianBlocks Hamiltonian::hessian(const Vec<double>& q, const Vec<double>& p) const
{
    const std::size_t n = dim();
    const AdPhaseState z = seed_variables(PhaseState{q, p});
    const Vec<AdScalar> gq = grad_q(z.q, z.p);
    const Vec<AdScalar> gp = grad_p(z.q, z.p);

    HessianBlocks out{Matrix(n, n), Matrix(n, n), Matrix(n, n)};
    for (std::size_t r = 0; r < n; ++r) {
        if (!all_finite(gq[r]) || !all_finite(gp[r])) {
            throw NonFiniteError(name() + ": non-finite Hessian entry in row " + std::to_string(r));
        }
        for (std::size_t s = 0; s < n; ++s) {
            out.qq(r, s) = gq[r].derivative(s);
            out.pq(r, s) = gq[r].derivative(n + s);
            out.pp(r, s) = gp[r].derivative(n + s);
        }
    }
    return out;
}

QuadraticModel::QuadraticModel(std::size_t n) : n_(n), xi_(n, n)
{
    if (n < 2) {
        throw std::invalid_argument("quadratic model needs N >= 2 (N = 1 has no cross terms)");
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            xi_(i, j) = i < j ? -2.0 : (i > j ? 1.0 : 0.0);
        }
    }
}

HessianBlocks QuadraticModel::hessian(const Vec<double>& q, const Vec<double>& p) const
{
    check_dims(q.size(), p.size());
    return {Matrix::identity(n_), Matrix::identity(n_), xi_};
}

QuadraticModel quadratic_model(std::size_t n) { return QuadraticModel(n); }

HarmonicOscillator::HarmonicOscillator(std::size_t n) : n_(n)
{
    if (n == 0) {
        throw std::invalid_argument("harmonic oscillator needs N >= 1");
    }
}

HessianBlocks HarmonicOscillator::hessian(const Vec<double>& q, const Vec<double>& p) const
{
    check_dims(q.size(), p.size());
    return {Matrix::identity(n_), Matrix::identity(n_), Matrix(n_, n_)};
}

HarmonicOscillator harmonic_oscillator(std::size_t n) { return HarmonicOscillator(n); }

HessianBlocks SwappedHamiltonian::hessian(const Vec<double>& big_q, const Vec<double>& big_p) const
{
    Vec<double> q = big_p;
    Vec<double> p = big_q;
    for (auto& x : p) x = -x;
    const HessianBlocks b = base_.hessian(q, p);
    // H_hat_Q = -H_p(P, -Q), H_hat_P = H_q(P, -Q)
    return {b.pp, b.qq, -b.qp()};
}

double gradient_fd_mismatch(const Hamiltonian& h, const PhaseState& at, double step)
{
    const std::size_t n = h.dim();
    const Vec<double> gq = h.grad_q(at.q, at.p);
    const Vec<double> gp = h.grad_p(at.q, at.p);

    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        scale = std::max({scale, std::abs(gq[i]), std::abs(gp[i])});
    }
    scale = std::max(scale, 1e-300);

    double worst = 0.0;
    for (std::size_t k = 0; k < 2 * n; ++k) {
        PhaseState plus = at;
        PhaseState minus = at;
        double& xp = k < n ? plus.q[k] : plus.p[k - n];
        double& xm = k < n ? minus.q[k] : minus.p[k - n];
        const double hk = step * std::max(1.0, std::abs(xp));
        xp += hk;
        xm -= hk;
        const double fd = (h.value(plus) - h.value(minus)) / (xp - xm);
        const double an = k < n ? gq[k] : gp[k - n];
        worst = std::max(worst, std::abs(fd - an) / scale);
    }
    return worst;
}

} // namespace pseudosym
