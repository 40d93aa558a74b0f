#pragma once

// One-step numerical flows with a fixed number of fixed-point iterations.
//
// All step functions are templates over the scalar type so that the exact
// unrolled computation (M iterations, no early exit, initial guess equal to
// the current state) can be differentiated with dual numbers.

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "pseudosym/hamiltonian.hpp"
#include "pseudosym/tokamak.hpp"

namespace pseudosym {

enum class Scheme {
    PImplicitSE,       // Phi: FPI on p, explicit q update
    QImplicitSE,       // Psi: FPI on q, explicit p update
    SvPQ,              // Upsilon = Psi_{h/2}^{[M2]} o Phi_{h/2}^{[M1]}
    SvQP,              // Lambda  = Phi_{h/2}^{[M2]} o Psi_{h/2}^{[M1]}
    LinearImplicitEM,  // p-implicit SE for 1/2|p - A(q)|^2 solved as a linear system
    ExactSEQuadratic,  // SE for the quadratic model with an exact linear solve
};

enum class ImplicitSide { P, Q };

std::string_view scheme_name(Scheme s) noexcept;
/// Accepts the names produced by scheme_name.
std::optional<Scheme> parse_scheme(std::string_view name) noexcept;

struct SchemeConfig {
    Scheme variant = Scheme::QImplicitSE;
    double h = 0.1;
    int M = 1;
    int M1 = 1;
    int M2 = 1;
    ImplicitSide side = ImplicitSide::P;  // ExactSEQuadratic only

    bool is_sv() const noexcept { return variant == Scheme::SvPQ || variant == Scheme::SvQP; }
    bool uses_fpi() const noexcept
    {
        return variant == Scheme::PImplicitSE || variant == Scheme::QImplicitSE || is_sv();
    }
    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

class StepError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

template <class S>
void require_finite(const Vec<S>& v, const char* scheme, const char* what, int fpi_index)
{
    for (const auto& x : v) {
        if (!all_finite(x)) {
            throw StepError(std::string(scheme) + ": non-finite " + what + " at FPI index " +
                            std::to_string(fpi_index));
        }
    }
}

inline void require_iterations(int m, const char* scheme)
{
    if (m < 1) {
        throw std::invalid_argument(std::string(scheme) + ": iteration count must be >= 1");
    }
}

} // namespace detail

/// p_0 = p; p_{n+1} = p - h H_q(q, p_n), n < M; q~ = q + h H_p(q, p_M).
template <class S>
BasicPhaseState<S> step_p_implicit(const Hamiltonian& ham, const BasicPhaseState<S>& z, double h, int m)
{
    detail::require_iterations(m, "p-implicit SE");
    Vec<S> pn = z.p;
    for (int n = 0; n < m; ++n) {
        const Vec<S> g = ham.grad_q(z.q, pn);
        for (std::size_t i = 0; i < pn.size(); ++i) {
            pn[i] = z.p[i] - h * g[i];
        }
        detail::require_finite(pn, "p-implicit SE", "momentum iterate", n + 1);
    }
    const Vec<S> g = ham.grad_p(z.q, pn);
    BasicPhaseState<S> out{z.q, std::move(pn)};
    for (std::size_t i = 0; i < out.q.size(); ++i) {
        out.q[i] = z.q[i] + h * g[i];
    }
    detail::require_finite(out.q, "p-implicit SE", "position update", m);
    return out;
}

/// q_0 = q; q_{n+1} = q + h H_p(q_n, p), n < M; p~ = p - h H_q(q_M, p).
template <class S>
BasicPhaseState<S> step_q_implicit(const Hamiltonian& ham, const BasicPhaseState<S>& z, double h, int m)
{
    detail::require_iterations(m, "q-implicit SE");
    Vec<S> qn = z.q;
    for (int n = 0; n < m; ++n) {
        const Vec<S> g = ham.grad_p(qn, z.p);
        for (std::size_t i = 0; i < qn.size(); ++i) {
            qn[i] = z.q[i] + h * g[i];
        }
        detail::require_finite(qn, "q-implicit SE", "position iterate", n + 1);
    }
    const Vec<S> g = ham.grad_q(qn, z.p);
    BasicPhaseState<S> out{std::move(qn), z.p};
    for (std::size_t i = 0; i < out.p.size(); ++i) {
        out.p[i] = z.p[i] - h * g[i];
    }
    detail::require_finite(out.p, "q-implicit SE", "momentum update", m);
    return out;
}

/// Stormer-Verlet, p-first: Psi_{h/2}^{[M2]} o Phi_{h/2}^{[M1]}.
template <class S>
BasicPhaseState<S> step_sv_pq(const Hamiltonian& ham, const BasicPhaseState<S>& z, double h, int m1, int m2)
{
    return step_q_implicit(ham, step_p_implicit(ham, z, 0.5 * h, m1), 0.5 * h, m2);
}

/// Stormer-Verlet, q-first: Phi_{h/2}^{[M2]} o Psi_{h/2}^{[M1]}.
template <class S>
BasicPhaseState<S> step_sv_qp(const Hamiltonian& ham, const BasicPhaseState<S>& z, double h, int m1, int m2)
{
    return step_p_implicit(ham, step_q_implicit(ham, z, 0.5 * h, m1), 0.5 * h, m2);
}

/// Solves (I - h D_qA(q))^T p~ = p - h D_qA(q)^T A(q), then q~ = q + h (p~ - A(q)).
template <class S>
BasicPhaseState<S> step_linear_implicit_em(const MagneticHamiltonian& ham, const BasicPhaseState<S>& z,
                                           double h)
{
    const PotentialEval<S> pot = ham.potential(z.q);
    constexpr std::size_t n = 3;
    std::vector<S> lhs(n * n);
    std::vector<S> rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
        S acc(0.0);
        for (std::size_t j = 0; j < n; ++j) {
            // (I - h D)^T_{ij} = delta_ij - h D_{ji}
            lhs[i * n + j] = (i == j ? S(1.0) : S(0.0)) - h * pot.jac[j * n + i];
            acc = acc + pot.jac[j * n + i] * pot.a[j];
        }
        rhs[i] = z.p[i] - h * acc;
    }
    Vec<S> p_new;
    try {
        p_new = solve_dense(std::move(lhs), std::move(rhs), n, [](const S& x) { return value_of(x); });
    } catch (const SingularMatrixError& e) {
        throw StepError("linear-implicit EM step: singular system for h = " + std::to_string(h) +
                        " (pivot " + std::to_string(e.pivot_index()) +
                        ", |pivot| = " + std::to_string(e.pivot_magnitude()) + ")");
    }
    BasicPhaseState<S> out{z.q, p_new};
    for (std::size_t i = 0; i < n; ++i) {
        out.q[i] = z.q[i] + h * (p_new[i] - pot.a[i]);
    }
    detail::require_finite(out.q, "linear-implicit EM", "position update", 0);
    detail::require_finite(out.p, "linear-implicit EM", "momentum update", 0);
    return out;
}

/// Symplectic Euler for the quadratic model with the implicit stage solved
/// exactly: side P solves (I + h Xi) p~ = p - h q, then q~ = q + h (p~ + Xi^T q);
/// side Q solves (I - h Xi^T) q~ = q + h p, then p~ = p - h (q~ + Xi p).
template <class S>
BasicPhaseState<S> exact_se_quadratic(const BasicPhaseState<S>& z, double h, std::size_t n, ImplicitSide side)
{
    const QuadraticModel model(n);
    const Matrix& xi = model.xi();
    if (z.q.size() != n || z.p.size() != n) {
        throw DimensionError("exact_se_quadratic: state dimension differs from N");
    }
    std::vector<S> lhs(n * n);
    std::vector<S> rhs(n);
    const auto value_fn = [](const S& x) { return value_of(x); };
    try {
        if (side == ImplicitSide::P) {
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    lhs[i * n + j] = S((i == j ? 1.0 : 0.0) + h * xi(i, j));
                }
                rhs[i] = z.p[i] - h * z.q[i];
            }
            BasicPhaseState<S> out{z.q, solve_dense(std::move(lhs), std::move(rhs), n, value_fn)};
            for (std::size_t i = 0; i < n; ++i) {
                S xt_q(0.0);
                for (std::size_t j = 0; j < n; ++j) xt_q = xt_q + xi(j, i) * z.q[j];
                out.q[i] = z.q[i] + h * (out.p[i] + xt_q);
            }
            return out;
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                lhs[i * n + j] = S((i == j ? 1.0 : 0.0) - h * xi(j, i));
            }
            rhs[i] = z.q[i] + h * z.p[i];
        }
        BasicPhaseState<S> out{solve_dense(std::move(lhs), std::move(rhs), n, value_fn), z.p};
        for (std::size_t i = 0; i < n; ++i) {
            S xi_p(0.0);
            for (std::size_t j = 0; j < n; ++j) xi_p = xi_p + xi(i, j) * z.p[j];
            out.p[i] = z.p[i] - h * (out.q[i] + xi_p);
        }
        return out;
    } catch (const SingularMatrixError& e) {
        throw StepError(std::string("exact_se_quadratic: singular stage matrix for h = ") +
                        std::to_string(h) + ": " + e.what());
    }
}

/// Applies the configured one-step map.
template <class S>
BasicPhaseState<S> step(const Hamiltonian& ham, const SchemeConfig& cfg, const BasicPhaseState<S>& z)
{
    switch (cfg.variant) {
    case Scheme::PImplicitSE:
        return step_p_implicit(ham, z, cfg.h, cfg.M);
    case Scheme::QImplicitSE:
        return step_q_implicit(ham, z, cfg.h, cfg.M);
    case Scheme::SvPQ:
        return step_sv_pq(ham, z, cfg.h, cfg.M1, cfg.M2);
    case Scheme::SvQP:
        return step_sv_qp(ham, z, cfg.h, cfg.M1, cfg.M2);
    case Scheme::LinearImplicitEM: {
        const auto* em = dynamic_cast<const MagneticHamiltonian*>(&ham);
        if (em == nullptr) {
            throw std::invalid_argument("linear-implicit scheme needs a Hamiltonian of the form 1/2|p - A(q)|^2");
        }
        return step_linear_implicit_em(*em, z, cfg.h);
    }
    case Scheme::ExactSEQuadratic: {
        if (dynamic_cast<const QuadraticModel*>(&ham) == nullptr) {
            throw std::invalid_argument("exact-se scheme is only defined for the quadratic model");
        }
        return exact_se_quadratic(z, cfg.h, ham.dim(), cfg.side);
    }
    }
    throw std::logic_error("step: unknown scheme");
}

struct Trajectory {
    std::vector<std::size_t> steps;
    std::vector<double> times;
    std::vector<PhaseState> states;
    std::vector<double> energies;
    /// Set when the run stopped early (see IntegrateOptions::blowup_factor).
    std::optional<std::size_t> stopped_at;
};

struct IntegrateOptions {
    std::size_t steps = 1;
    std::size_t stride = 1;
    /// Stop when |H - H0| exceeds this multiple of |H0| (0 disables).
    double blowup_factor = 0.0;
};

/// Repeated application of the configured one-step map. Sample 0 is the
/// initial state; then every `stride` steps (and the final step).
Trajectory integrate(const Hamiltonian& ham, const SchemeConfig& cfg, const PhaseState& initial,
                     const IntegrateOptions& opts);

/// Streaming variant: calls `sink(step, t, state, energy)` for each sample
/// instead of storing states. Returns the step at which a blow-up stop
/// happened, if any.
std::optional<std::size_t> integrate_streaming(
    const Hamiltonian& ham, const SchemeConfig& cfg, const PhaseState& initial,
    const IntegrateOptions& opts,
    const std::function<void(std::size_t, double, const PhaseState&, double)>& sink);

} // namespace pseudosym
