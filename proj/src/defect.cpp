#include "pseudosym/defect.hpp"

#include <algorithm>
#include <cmath>

namespace pseudosym {

Matrix Block2x2::assemble() const
{
    const std::size_t n = block_dim();
    Matrix m(2 * n, 2 * n);
    m.set_block(0, 0, tl);
    m.set_block(0, n, tr);
    m.set_block(n, 0, bl);
    m.set_block(n, n, br);
    return m;
}

Block2x2 split_blocks(const Matrix& m)
{
    if (!m.square() || m.rows() % 2 != 0) {
        throw DimensionError("split_blocks: matrix must be square with even dimension");
    }
    const std::size_t n = m.rows() / 2;
    return {m.block(0, 0, n, n), m.block(0, n, n, n), m.block(n, 0, n, n), m.block(n, n, n, n)};
}

DefectBlock defect_block(Scheme s) noexcept
{
    switch (s) {
    case Scheme::QImplicitSE:
        return DefectBlock::BottomRight;
    case Scheme::SvPQ:
    case Scheme::SvQP:
        return DefectBlock::Both;
    case Scheme::PImplicitSE:
    case Scheme::LinearImplicitEM:
    case Scheme::ExactSEQuadratic:
        break;
    }
    return DefectBlock::TopLeft;
}

Block2x2 DefectReport::perturbation() const
{
    const std::size_t n = blocks.block_dim();
    const Matrix eye = Matrix::identity(n);
    return {blocks.tl, blocks.tr - eye, blocks.bl + eye, blocks.br};
}

DefectReport jtilde(const Matrix& dphi, Scheme variant)
{
    if (!dphi.square() || dphi.rows() % 2 != 0 || dphi.rows() == 0) {
        throw DimensionError("jtilde: Jacobian must be square with even dimension");
    }
    const std::size_t n = dphi.rows() / 2;
    DefectReport r;
    r.jtilde = transpose(dphi) * (symplectic_J(n) * dphi);
    r.blocks = split_blocks(r.jtilde);
    r.tl_norm = frobenius_norm(r.blocks.tl);
    r.br_norm = frobenius_norm(r.blocks.br);
    switch (defect_block(variant)) {
    case DefectBlock::TopLeft:
        r.delta = r.tl_norm;
        break;
    case DefectBlock::BottomRight:
        r.delta = r.br_norm;
        break;
    case DefectBlock::Both:
        r.delta = std::hypot(r.tl_norm, r.br_norm);
        break;
    }
    r.alpha = frobenius_norm(r.blocks.tr - Matrix::identity(n));
    r.skew_residual = frobenius_norm(r.jtilde + transpose(r.jtilde));
    r.det_flow = determinant(dphi);
    r.det_antidiag = std::abs(determinant(r.blocks.tr));
    return r;
}

Matrix flow_jacobian_ad(const Hamiltonian& ham, const SchemeConfig& cfg, const PhaseState& at)
{
    return jacobian([&](const AdPhaseState& z) { return step(ham, cfg, z); }, at);
}

namespace {

Matrix analytic_p_implicit(const Hamiltonian& ham, const PhaseState& at, double h, int m)
{
    const std::size_t n = ham.dim();
    std::vector<Vec<double>> iterates{at.p};
    for (int k = 0; k < m; ++k) {
        const Vec<double> g = ham.grad_q(at.q, iterates.back());
        Vec<double> next(n);
        for (std::size_t i = 0; i < n; ++i) next[i] = at.p[i] - h * g[i];
        iterates.push_back(std::move(next));
    }
    std::vector<HessianBlocks> hess;
    hess.reserve(iterates.size());
    for (const auto& pk : iterates) hess.push_back(ham.hessian(at.q, pk));

    const Matrix eye = Matrix::identity(n);
    const auto mu = static_cast<std::size_t>(m);

    // prod_{i=1}^{k} H_pq^{[M-i]}, grown one factor at a time.
    Matrix prod = eye;
    Matrix p_p = eye;
    Matrix p_q(n, n);
    double coeff = 1.0;
    for (std::size_t k = 1; k <= mu; ++k) {
        coeff *= -h;
        p_q += coeff * (prod * hess[mu - k].qq);
        prod = prod * hess[mu - k].pq;
        p_p += coeff * prod;
    }

    const HessianBlocks& last = hess[mu];
    const Matrix q_q = eye + h * last.qp() + h * (last.pp * p_q);
    const Matrix q_p = h * (last.pp * p_p);

    Matrix jac(2 * n, 2 * n);
    jac.set_block(0, 0, q_q);
    jac.set_block(0, n, q_p);
    jac.set_block(n, 0, p_q);
    jac.set_block(n, n, p_p);
    return jac;
}

Matrix analytic_q_implicit(const Hamiltonian& ham, const PhaseState& at, double h, int m)
{
    // Psi_H = zeta^{-1} o Phi_{H o zeta^{-1}} o zeta and D zeta = J^T.
    const SwappedHamiltonian swapped(ham);
    const Matrix inner = analytic_p_implicit(swapped, swap_coordinates(at), h, m);
    const Matrix j = symplectic_J(ham.dim());
    return j * inner * transpose(j);
}

} // namespace

Matrix flow_jacobian_analytic(const Hamiltonian& ham, const SchemeConfig& cfg, const PhaseState& at)
{
    require_consistent(at);
    switch (cfg.variant) {
    case Scheme::PImplicitSE:
        detail::require_iterations(cfg.M, "analytic Jacobian");
        return analytic_p_implicit(ham, at, cfg.h, cfg.M);
    case Scheme::QImplicitSE:
        detail::require_iterations(cfg.M, "analytic Jacobian");
        return analytic_q_implicit(ham, at, cfg.h, cfg.M);
    case Scheme::SvPQ: {
        const PhaseState mid = step_p_implicit(ham, at, 0.5 * cfg.h, cfg.M1);
        return analytic_q_implicit(ham, mid, 0.5 * cfg.h, cfg.M2) *
               analytic_p_implicit(ham, at, 0.5 * cfg.h, cfg.M1);
    }
    case Scheme::SvQP: {
        const PhaseState mid = step_q_implicit(ham, at, 0.5 * cfg.h, cfg.M1);
        return analytic_p_implicit(ham, mid, 0.5 * cfg.h, cfg.M2) *
               analytic_q_implicit(ham, at, 0.5 * cfg.h, cfg.M1);
    }
    case Scheme::LinearImplicitEM:
    case Scheme::ExactSEQuadratic:
        break;
    }
    throw std::invalid_argument("flow_jacobian_analytic: no recursion for scheme '" +
                                std::string(scheme_name(cfg.variant)) + "'");
}

DefectReport analyze_defect(const Hamiltonian& ham, const SchemeConfig& cfg, const PhaseState& at)
{
    return jtilde(flow_jacobian_ad(ham, cfg, at), cfg.variant);
}

VolumeDefect volume_defect(const Matrix& dphi, const DefectReport& report)
{
    const double det_flow = determinant(dphi);
    const double det_antidiag = std::abs(determinant(report.blocks.tr));
    return {det_flow, det_antidiag, std::abs(std::abs(det_flow) - det_antidiag)};
}

double coordinate_swap_check(const Hamiltonian& ham, double h, int m, const PhaseState& at)
{
    const SwappedHamiltonian swapped(ham);
    const PhaseState lhs = swap_coordinates(step_q_implicit(ham, at, h, m));
    const PhaseState rhs = step_p_implicit(swapped, swap_coordinates(at), h, m);
    double worst = 0.0;
    for (std::size_t i = 0; i < at.dim(); ++i) {
        worst = std::max({worst, std::abs(lhs.q[i] - rhs.q[i]), std::abs(lhs.p[i] - rhs.p[i])});
    }
    return worst;
}

} // namespace pseudosym
