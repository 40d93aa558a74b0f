#pragma once

// Hamiltonian models H(q, p) with gradients and Hessian blocks.
//
// Every model evaluates on plain doubles and on AdScalar duals so that the
// one-step flow maps built on top of it can be differentiated exactly.
//
// Hessian block conventions (rows index the differentiated gradient):
//   qq = D_q(H_q), pp = D_p(H_p), pq = D_p(H_q), i.e. pq(r, s) = d2H/dq_r dp_s,
//   and qp = pq^T = D_q(H_p).

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>

#include "pseudosym/autodiff.hpp"
#include "pseudosym/linalg.hpp"
#include "pseudosym/phase_state.hpp"

namespace pseudosym {

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct HessianBlocks {
    Matrix qq;
    Matrix pp;
    Matrix pq;

    Matrix qp() const { return transpose(pq); }
};

class Hamiltonian {
public:
    virtual ~Hamiltonian() = default;

    virtual std::size_t dim() const = 0;
    virtual std::string name() const = 0;
    /// True when H = T(p) + V(q); FPI then reaches its fixed point in one sweep.
    virtual bool separable() const { return false; }

    virtual double value(const Vec<double>& q, const Vec<double>& p) const = 0;
    virtual AdScalar value(const Vec<AdScalar>& q, const Vec<AdScalar>& p) const = 0;
    virtual Vec<double> grad_q(const Vec<double>& q, const Vec<double>& p) const = 0;
    virtual Vec<AdScalar> grad_q(const Vec<AdScalar>& q, const Vec<AdScalar>& p) const = 0;
    virtual Vec<double> grad_p(const Vec<double>& q, const Vec<double>& p) const = 0;
    virtual Vec<AdScalar> grad_p(const Vec<AdScalar>& q, const Vec<AdScalar>& p) const = 0;

    /// Default: forward-mode differentiation of the analytic gradients.
    virtual HessianBlocks hessian(const Vec<double>& q, const Vec<double>& p) const;

    double value(const PhaseState& z) const { return value(z.q, z.p); }
    Matrix hess_qq(const Vec<double>& q, const Vec<double>& p) const { return hessian(q, p).qq; }
    Matrix hess_pp(const Vec<double>& q, const Vec<double>& p) const { return hessian(q, p).pp; }
    Matrix hess_pq(const Vec<double>& q, const Vec<double>& p) const { return hessian(q, p).pq; }
    Matrix hess_qp(const Vec<double>& q, const Vec<double>& p) const { return hessian(q, p).qp(); }

protected:
    void check_dims(std::size_t nq, std::size_t np) const;
};

/// Implements the virtual double/AdScalar pairs by forwarding to the model's
/// member templates `energy<S>`, `dq<S>`, `dp<S>`.
template <class Model>
class HamiltonianCrtp : public Hamiltonian {
public:
    using Hamiltonian::value;

    double value(const Vec<double>& q, const Vec<double>& p) const override
    {
        check_dims(q.size(), p.size());
        return self().template energy<double>(q, p);
    }
    AdScalar value(const Vec<AdScalar>& q, const Vec<AdScalar>& p) const override
    {
        check_dims(q.size(), p.size());
        return self().template energy<AdScalar>(q, p);
    }
    Vec<double> grad_q(const Vec<double>& q, const Vec<double>& p) const override
    {
        check_dims(q.size(), p.size());
        return self().template dq<double>(q, p);
    }
    Vec<AdScalar> grad_q(const Vec<AdScalar>& q, const Vec<AdScalar>& p) const override
    {
        check_dims(q.size(), p.size());
        return self().template dq<AdScalar>(q, p);
    }
    Vec<double> grad_p(const Vec<double>& q, const Vec<double>& p) const override
    {
        check_dims(q.size(), p.size());
        return self().template dp<double>(q, p);
    }
    Vec<AdScalar> grad_p(const Vec<AdScalar>& q, const Vec<AdScalar>& p) const override
    {
        check_dims(q.size(), p.size());
        return self().template dp<AdScalar>(q, p);
    }

private:
    const Model& self() const { return static_cast<const Model&>(*this); }
};

/// H = 1/2 sum(p_i^2 + q_i^2) + sum_{i<j} (p_i q_j - 2 q_i p_j).
/// Its mixed Hessian is the constant Toeplitz matrix Xi (0 on the diagonal,
/// -2 above, +1 below); H_q = q + Xi p and H_p = p + Xi^T q.
class QuadraticModel final : public HamiltonianCrtp<QuadraticModel> {
public:
    explicit QuadraticModel(std::size_t n);

    std::size_t dim() const override { return n_; }
    std::string name() const override { return "quadratic"; }
    HessianBlocks hessian(const Vec<double>& q, const Vec<double>& p) const override;

    const Matrix& xi() const noexcept { return xi_; }

    template <class S>
    S energy(const Vec<S>& q, const Vec<S>& p) const
    {
        S acc(0.0);
        for (std::size_t i = 0; i < n_; ++i) {
            acc = acc + 0.5 * (p[i] * p[i] + q[i] * q[i]);
        }
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = i + 1; j < n_; ++j) {
                acc = acc + (p[i] * q[j] - 2.0 * (q[i] * p[j]));
            }
        }
        return acc;
    }

    template <class S>
    Vec<S> dq(const Vec<S>& q, const Vec<S>& p) const
    {
        Vec<S> g(n_);
        for (std::size_t k = 0; k < n_; ++k) {
            S below(0.0);
            S above(0.0);
            for (std::size_t i = 0; i < k; ++i) below = below + p[i];
            for (std::size_t i = k + 1; i < n_; ++i) above = above + p[i];
            g[k] = q[k] + below - 2.0 * above;
        }
        return g;
    }

    template <class S>
    Vec<S> dp(const Vec<S>& q, const Vec<S>& p) const
    {
        Vec<S> g(n_);
        for (std::size_t k = 0; k < n_; ++k) {
            S below(0.0);
            S above(0.0);
            for (std::size_t i = 0; i < k; ++i) below = below + q[i];
            for (std::size_t i = k + 1; i < n_; ++i) above = above + q[i];
            g[k] = p[k] + above - 2.0 * below;
        }
        return g;
    }

private:
    std::size_t n_;
    Matrix xi_;
};

QuadraticModel quadratic_model(std::size_t n);

/// H = 1/2 |p|^2 + 1/2 |q|^2.
class HarmonicOscillator final : public HamiltonianCrtp<HarmonicOscillator> {
public:
    explicit HarmonicOscillator(std::size_t n);

    std::size_t dim() const override { return n_; }
    std::string name() const override { return "harmonic"; }
    bool separable() const override { return true; }
    HessianBlocks hessian(const Vec<double>& q, const Vec<double>& p) const override;

    template <class S>
    S energy(const Vec<S>& q, const Vec<S>& p) const
    {
        S acc(0.0);
        for (std::size_t i = 0; i < n_; ++i) {
            acc = acc + 0.5 * (p[i] * p[i] + q[i] * q[i]);
        }
        return acc;
    }
    template <class S>
    Vec<S> dq(const Vec<S>& q, const Vec<S>&) const
    {
        return q;
    }
    template <class S>
    Vec<S> dp(const Vec<S>&, const Vec<S>& p) const
    {
        return p;
    }

private:
    std::size_t n_;
};

HarmonicOscillator harmonic_oscillator(std::size_t n);

/// H_hat(Q, P) = H(P, -Q): the model seen through the canonical swap
/// (q, p) -> (Q, P) = (-p, q). Holds a reference; `base` must outlive it.
class SwappedHamiltonian final : public HamiltonianCrtp<SwappedHamiltonian> {
public:
    explicit SwappedHamiltonian(const Hamiltonian& base) : base_(base) {}

    std::size_t dim() const override { return base_.dim(); }
    std::string name() const override { return base_.name() + "-swapped"; }
    bool separable() const override { return base_.separable(); }
    HessianBlocks hessian(const Vec<double>& q, const Vec<double>& p) const override;

    template <class S>
    S energy(const Vec<S>& big_q, const Vec<S>& big_p) const
    {
        return base_.value(big_p, negated(big_q));
    }
    template <class S>
    Vec<S> dq(const Vec<S>& big_q, const Vec<S>& big_p) const
    {
        return negated(base_.grad_p(big_p, negated(big_q)));
    }
    template <class S>
    Vec<S> dp(const Vec<S>& big_q, const Vec<S>& big_p) const
    {
        return base_.grad_q(big_p, negated(big_q));
    }

private:
    template <class S>
    static Vec<S> negated(Vec<S> v)
    {
        for (auto& x : v) x = -x;
        return v;
    }

    const Hamiltonian& base_;
};

/// zeta(q, p) = (-p, q)
template <class S>
BasicPhaseState<S> swap_coordinates(const BasicPhaseState<S>& z)
{
    BasicPhaseState<S> out{z.p, z.q};
    for (auto& x : out.q) x = -x;
    return out;
}

/// zeta^{-1}(Q, P) = (P, -Q)
template <class S>
BasicPhaseState<S> unswap_coordinates(const BasicPhaseState<S>& z)
{
    BasicPhaseState<S> out{z.p, z.q};
    for (auto& x : out.p) x = -x;
    return out;
}

/// Max relative mismatch between the analytic gradients and central
/// differences of `value` at (q, p).
double gradient_fd_mismatch(const Hamiltonian& h, const PhaseState& at, double step = 1e-6);

} // namespace pseudosym
