#pragma once

// Symplectic defect of a one-step map Theta:
//
//   J~ = (D Theta)^T J (D Theta) = [ [q~_q, p~_q]    A         ]
//                                  [ -A^T            [q~_p, p~_p] ],
//   A  = q~_q^T p~_p - p~_q^T q~_p,
//
// where [R, S] = R^T S - S^T R. J~ is skew-symmetric for any Theta.

#include <cstddef>

#include "pseudosym/integrators.hpp"
#include "pseudosym/linalg.hpp"

namespace pseudosym {

struct Block2x2 {
    Matrix tl;
    Matrix tr;
    Matrix bl;
    Matrix br;

    std::size_t block_dim() const noexcept { return tl.rows(); }
    Matrix assemble() const;
};

/// Splits an even-sized square matrix into four N x N blocks.
Block2x2 split_blocks(const Matrix& m);

/// Which diagonal block of J~ carries the FPI defect for a scheme: the other
/// one vanishes identically for the Symplectic Euler variants.
enum class DefectBlock { TopLeft, BottomRight, Both };
DefectBlock defect_block(Scheme s) noexcept;

struct DefectReport {
    Matrix jtilde;
    Block2x2 blocks;      // tl = [q~_q, p~_q], tr = A, bl = -A^T, br = [q~_p, p~_p]
    double delta = 0.0;   // ||designated diagonal block||_F (both blocks combined for SV)
    double alpha = 0.0;   // ||A - I||_F
    double skew_residual = 0.0;  // ||J~ + J~^T||_F
    double det_flow = 0.0;       // det D Theta
    double det_antidiag = 0.0;   // |det A|
    double tl_norm = 0.0;
    double br_norm = 0.0;

    const Matrix& antidiagonal() const noexcept { return blocks.tr; }
    /// Blocks of J~ - J: P11 = tl, P12 = tr - I, P21 = bl + I, P22 = br.
    Block2x2 perturbation() const;
};

/// Forms J~ = DPhi^T J DPhi and measures it. `variant` only selects which
/// diagonal block is reported as delta.
DefectReport jtilde(const Matrix& dphi, Scheme variant);

/// Exact Jacobian of the configured one-step map by forward-mode AD.
Matrix flow_jacobian_ad(const Hamiltonian& ham, const SchemeConfig& cfg, const PhaseState& at);

/// Jacobian assembled from Hessian blocks at the FPI iterates:
///   p~_q = sum_{n=1}^{M} (-h)^n (prod_{i=1}^{n-1} H_pq^{[M-i]}) H_qq^{[M-n]},
///   p~_p = sum_{n=0}^{M} (-h)^n prod_{i=1}^{n} H_pq^{[M-i]},
///   q~_q = I + h H_qp^{[M]} + h H_pp^{[M]} p~_q,   q~_p = h H_pp^{[M]} p~_p,
/// with H^{[n]} evaluated at (q, p_n). The q-implicit scheme is obtained by
/// conjugating the p-implicit scheme of H o zeta^{-1} with zeta, and the SV
/// variants by the chain rule over their two half steps.
Matrix flow_jacobian_analytic(const Hamiltonian& ham, const SchemeConfig& cfg, const PhaseState& at);

/// Convenience: AD Jacobian followed by jtilde.
DefectReport analyze_defect(const Hamiltonian& ham, const SchemeConfig& cfg, const PhaseState& at);

struct VolumeDefect {
    double det_flow;
    double det_antidiag;
    double discrepancy;  // | |det_flow| - det_antidiag |
};

/// |det D Theta| equals |det A| whenever one diagonal block of J~ vanishes.
VolumeDefect volume_defect(const Matrix& dphi, const DefectReport& report);

/// max |zeta(Psi_h^{[M]}(z)) - Phi_h^{[M]}(zeta(z))| with Phi built on H o zeta^{-1}.
double coordinate_swap_check(const Hamiltonian& ham, double h, int m, const PhaseState& at);

} // namespace pseudosym
