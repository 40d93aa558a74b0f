#pragma once

// Charged particle in a simplified tokamak field, in nondimensional Cartesian
// coordinates:
//
//   H' = 1/2 |p' - A'(q')|^2,
//   A  = B0 F(r)/rho e_phi - B0 R log(rho/R) e_z,
//   F(r) = int_0^r f,  f(r) = r / (R s(r)),  s(r) = (1 + a r)/(1 + r^2),
//
// where rho is the cylindrical radius, r the distance from the magnetic axis
// circle (rho = R, z = 0) and s the safety factor.

#include <array>
#include <cmath>
#include <cstddef>
#include <string>

#include "pseudosym/hamiltonian.hpp"

namespace pseudosym {

/// SI parameters of the field and the particle. Defaults describe a proton in
/// a 5 m tokamak with a 20 mT field.
struct PhysicalParams {
    double major_radius = 5.0;     // R [m]
    double distance_param = 1.0;   // a [m]
    double b0 = 20e-3;             // B0 [T]
    double mass = 1.673e-27;       // m [kg]
    double charge = 1.602e-19;     // Q [C]

    /// Throws std::invalid_argument naming the first non-positive field.
    void validate() const;
};

/// Characteristic scales: L0 = 2 pi R, T0 = m/(Q B0), P0 = m L0/T0,
/// A0 = P0/Q, H0 = P0^2/m.
struct Nondimensionalizer {
    double length;     // L0
    double time;       // T0
    double momentum;   // P0
    double potential;  // A0
    double energy;     // H0

    static Nondimensionalizer from(const PhysicalParams& params);

    PhaseState nondimensionalize(const PhaseState& si) const;
    PhaseState dimensionalize(const PhaseState& nd) const;
};

/// Initial condition of the reference run, SI units:
/// x = (5.1, 0, 0.1) m, p = (1e-23, 1e-23, 1e-21) kg m/s.
PhaseState reference_initial_state_si();

/// Gauss-Legendre nodes and weights on [-1, 1], order 32.
struct GaussLegendre32 {
    std::array<double, 32> nodes;
    std::array<double, 32> weights;

    static const GaussLegendre32& instance();
};

/// s(r) = (1 + a r)/(1 + r^2)
double safety_factor(double r, const PhysicalParams& params);

/// F as a differentiable primitive: value by fixed-order quadrature, derivative
/// f(r) = r (1 + r^2) / (R (1 + a r)) as generic code. Lengths in metres.
class FluxFunction {
public:
    FluxFunction(double major_radius, double distance_param)
        : major_radius_(major_radius), distance_param_(distance_param)
    {
    }
    explicit FluxFunction(const PhysicalParams& params)
        : FluxFunction(params.major_radius, params.distance_param)
    {
    }

    /// Throws DomainError for r < 0 or when 1 + a*lambda vanishes on [0, r].
    double value(double r) const;

    template <class S>
    S derivative(const S& r) const
    {
        return r * (1.0 + r * r) / (major_radius_ * (1.0 + distance_param_ * r));
    }

private:
    double major_radius_;
    double distance_param_;
};

double F_integral(double r, const PhysicalParams& params);

/// rho below this fraction of R is rejected (axis singularity of e_phi and log).
inline constexpr double kAxisTolerance = 1e-9;

/// A'(q') in nondimensional units for nondimensional Cartesian position q'.
template <class S>
Vec<S> vector_potential(const Vec<S>& q, const PhysicalParams& params,
                        const Nondimensionalizer& scales)
{
    using std::log;
    using std::sqrt;
    if (q.size() != 3) {
        throw DimensionError("vector_potential: position must be 3-dimensional");
    }
    const double big_r = params.major_radius;
    const S x = q[0] * scales.length;
    const S y = q[1] * scales.length;
    const S z = q[2] * scales.length;
    const S rho = sqrt(x * x + y * y);
    if (!(value_of(rho) >= kAxisTolerance * big_r)) {
        throw DomainError("vector_potential: position too close to the symmetry axis (rho = " +
                          std::to_string(value_of(rho)) + " m)");
    }
    const S dr = rho - big_r;
    const S r = sqrt(dr * dr + z * z);
    const S flux = apply_primitive(FluxFunction(params), r);
    const double scale = params.b0 / scales.potential;
    const S a_phi = scale * flux / rho;
    return {-(a_phi * y / rho), a_phi * x / rho, -(scale * big_r) * log(rho / big_r)};
}

/// A(q) together with its Jacobian dA[i*3 + j] = dA_i/dq_j.
template <class S>
struct PotentialEval {
    Vec<S> a;
    Vec<S> jac;
};

/// Hamiltonians of the form 1/2 |p - A(q)|^2 with H_p = p - A and
/// H_q = -(D_q A)^T (p - A).
class MagneticHamiltonian : public HamiltonianCrtp<MagneticHamiltonian> {
public:
    std::size_t dim() const override { return 3; }

    virtual PotentialEval<double> potential(const Vec<double>& q) const = 0;
    virtual PotentialEval<AdScalar> potential(const Vec<AdScalar>& q) const = 0;

    template <class S>
    S energy(const Vec<S>& q, const Vec<S>& p) const
    {
        const PotentialEval<S> pot = potential(q);
        S acc(0.0);
        for (std::size_t i = 0; i < 3; ++i) {
            const S v = p[i] - pot.a[i];
            acc = acc + v * v;
        }
        return 0.5 * acc;
    }
    template <class S>
    Vec<S> dq(const Vec<S>& q, const Vec<S>& p) const
    {
        const PotentialEval<S> pot = potential(q);
        Vec<S> g(3, S(0.0));
        for (std::size_t i = 0; i < 3; ++i) {
            const S v = p[i] - pot.a[i];
            for (std::size_t j = 0; j < 3; ++j) {
                g[j] = g[j] - pot.jac[i * 3 + j] * v;
            }
        }
        return g;
    }
    template <class S>
    Vec<S> dp(const Vec<S>& q, const Vec<S>& p) const
    {
        const Vec<S> a = potential(q).a;
        Vec<S> g(3);
        for (std::size_t i = 0; i < 3; ++i) g[i] = p[i] - a[i];
        return g;
    }

protected:
    /// Evaluates a generic potential and differentiates it with 3-wide duals.
    template <class S, class PotentialFn>
    static PotentialEval<S> differentiate_potential(const Vec<S>& q, PotentialFn&& fn)
    {
        using Inner = Dual<S, 3>;
        if (q.size() != 3) {
            throw DimensionError("magnetic model: position must be 3-dimensional");
        }
        Vec<Inner> qi;
        qi.reserve(3);
        for (std::size_t j = 0; j < 3; ++j) qi.push_back(Inner::variable(q[j], j, 3));
        const Vec<Inner> a = fn(qi);
        PotentialEval<S> out{Vec<S>(3), Vec<S>(9)};
        for (std::size_t i = 0; i < 3; ++i) {
            out.a[i] = a[i].value();
            for (std::size_t j = 0; j < 3; ++j) out.jac[i * 3 + j] = a[i].grad()[j];
        }
        return out;
    }
};

class TokamakModel final : public MagneticHamiltonian {
public:
    explicit TokamakModel(PhysicalParams params = {});

    std::string name() const override { return "tokamak"; }

    PotentialEval<double> potential(const Vec<double>& q) const override;
    PotentialEval<AdScalar> potential(const Vec<AdScalar>& q) const override;

    const PhysicalParams& params() const noexcept { return params_; }
    const Nondimensionalizer& scales() const noexcept { return scales_; }

    /// Reference initial condition in nondimensional units.
    PhaseState reference_state() const { return scales_.nondimensionalize(reference_initial_state_si()); }

private:
    PhysicalParams params_;
    Nondimensionalizer scales_;
};

TokamakModel tokamak_model(const PhysicalParams& params = {});

/// Uniform magnetic field from the linear potential A = (-alpha y, beta x, 0).
/// alpha = beta = 0 is a free particle.
class LinearPotentialModel final : public MagneticHamiltonian {
public:
    LinearPotentialModel(double alpha, double beta) : alpha_(alpha), beta_(beta) {}

    std::string name() const override { return "linear-potential"; }

    PotentialEval<double> potential(const Vec<double>& q) const override;
    PotentialEval<AdScalar> potential(const Vec<AdScalar>& q) const override;

private:
    template <class S>
    PotentialEval<S> eval(const Vec<S>& q) const;

    double alpha_;
    double beta_;
};

} // namespace pseudosym
