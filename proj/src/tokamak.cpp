#include "pseudosym/tokamak.hpp"

#include <numbers>
#include <stdexcept>

namespace pseudosym {

void PhysicalParams::validate() const
{
    const std::pair<const char*, double> fields[] = {
        {"major_radius", major_radius}, {"distance_param", distance_param}, {"b0", b0},
        {"mass", mass},                 {"charge", charge},
    };
    for (const auto& [key, v] : fields) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw std::invalid_argument(std::string("physical parameter '") + key +
                                        "' must be strictly positive");
        }
    }
}

Nondimensionalizer Nondimensionalizer::from(const PhysicalParams& params)
{
    params.validate();
    Nondimensionalizer s{};
    s.length = 2.0 * std::numbers::pi * params.major_radius;
    s.time = params.mass / (params.charge * params.b0);
    s.momentum = params.mass * s.length / s.time;
    s.potential = s.momentum / params.charge;
    s.energy = s.momentum * s.momentum / params.mass;
    return s;
}

PhaseState Nondimensionalizer::nondimensionalize(const PhaseState& si) const
{
    require_consistent(si);
    PhaseState nd = si;
    for (auto& x : nd.q) x /= length;
    for (auto& x : nd.p) x /= momentum;
    return nd;
}

PhaseState Nondimensionalizer::dimensionalize(const PhaseState& nd) const
{
    require_consistent(nd);
    PhaseState si = nd;
    for (auto& x : si.q) x *= length;
    for (auto& x : si.p) x *= momentum;
    return si;
}

PhaseState reference_initial_state_si()
{
    return {{5.1, 0.0, 0.1}, {1e-23, 1e-23, 1e-21}};
}

const GaussLegendre32& GaussLegendre32::instance()
{
    static const GaussLegendre32 rule = [] {
        constexpr int n = 32;
        GaussLegendre32 g{};
        for (int i = 0; i < n / 2; ++i) {
            // Chebyshev-like initial guess, then Newton on P_n.
            double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int iter = 0; iter < 100; ++iter) {
                double p0 = 1.0;
                double p1 = x;
                for (int k = 2; k <= n; ++k) {
                    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = pk;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-16) {
                    break;
                }
            }
            const double w = 2.0 / ((1.0 - x * x) * dp * dp);
            g.nodes[i] = -x;
            g.nodes[n - 1 - i] = x;
            g.weights[i] = w;
            g.weights[n - 1 - i] = w;
        }
        return g;
    }();
    return rule;
}

double safety_factor(double r, const PhysicalParams& params)
{
    return (1.0 + params.distance_param * r) / (1.0 + r * r);
}

double FluxFunction::value(double r) const
{
    if (!(r >= 0.0) || !std::isfinite(r)) {
        throw DomainError("F(r): radius must be finite and non-negative");
    }
    // 1 + a*lambda = 0 at lambda = -1/a, inside [0, r] only for negative a.
    if (distance_param_ < 0.0 && -1.0 / distance_param_ <= r) {
        throw DomainError("F(r): integrand has a pole inside [0, r]");
    }
    if (r == 0.0) {
        return 0.0;
    }
    const auto& rule = GaussLegendre32::instance();
    const double half = 0.5 * r;
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        acc += rule.weights[i] * derivative(half * (rule.nodes[i] + 1.0));
    }
    return half * acc;
}

double F_integral(double r, const PhysicalParams& params) { return FluxFunction(params).value(r); }

TokamakModel::TokamakModel(PhysicalParams params)
    : params_(params), scales_(Nondimensionalizer::from(params))
{
}

PotentialEval<double> TokamakModel::potential(const Vec<double>& q) const
{
    return differentiate_potential(q, [this](const auto& x) { return vector_potential(x, params_, scales_); });
}

PotentialEval<AdScalar> TokamakModel::potential(const Vec<AdScalar>& q) const
{
    return differentiate_potential(q, [this](const auto& x) { return vector_potential(x, params_, scales_); });
}

TokamakModel tokamak_model(const PhysicalParams& params) { return TokamakModel(params); }

template <class S>
PotentialEval<S> LinearPotentialModel::eval(const Vec<S>& q) const
{
    if (q.size() != 3) {
        throw DimensionError("linear potential: position must be 3-dimensional");
    }
    PotentialEval<S> out{Vec<S>(3, S(0.0)), Vec<S>(9, S(0.0))};
    out.a[0] = -alpha_ * q[1];
    out.a[1] = beta_ * q[0];
    out.jac[0 * 3 + 1] = S(-alpha_);
    out.jac[1 * 3 + 0] = S(beta_);
    return out;
}

PotentialEval<double> LinearPotentialModel::potential(const Vec<double>& q) const { return eval(q); }
PotentialEval<AdScalar> LinearPotentialModel::potential(const Vec<AdScalar>& q) const { return eval(q); }

} // namespace pseudosym
